#include "nlsdyn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "nlsdyn/effective.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/modulation.hpp"
#include "nlsdyn/profile_family.hpp"
#include "nlsdyn/spectral.hpp"

namespace nlsdyn {
namespace {

const char* status_name(Error::Kind k) {
  switch (k) {
    case Error::Kind::config: return "config";
    case Error::Kind::certification: return "certification";
    case Error::Kind::numerical: return "numerical";
    case Error::Kind::usage: return "usage";
  }
  return "numerical";
}

std::vector<double> dims(const std::array<double, 2>& x, int d) { return {x.begin(), x.begin() + d}; }

JsonObject sigma_json(const SolitonParams& s, int d) {
  JsonObject o;
  o.add("a", dims(s.a, d)).add("v", dims(s.v, d)).add("gamma", s.gamma);
  o.add("gamma_mod", std::remainder(s.gamma, 2.0 * std::numbers::pi)).add("mu", s.mu);
  return o;
}

JsonObject spectrum_json(const SpectralReport& rep) {
  JsonObject o;
  o.add("kind", "spectrum").add("mu", rep.mu).add("negative_L1", rep.negative_L1).add("negative_L2", rep.negative_L2);
  o.add("lowest_L1", rep.lowest_L1).add("lowest_L2", rep.lowest_L2).add("condition_F", rep.condition_F);
  o.add("null_residual_L1", rep.null_residual_L1).add("null_residual_L2", rep.null_residual_L2);
  o.add("eta_L1inv_eta", rep.eta_L1inv_eta);
  if (rep.omega) {
    o.add("m", rep.omega->m).add("dm", rep.omega->dm);
  }
  if (rep.rho)
    o.add("rho", *rep.rho);
  else
    o.add_null("rho");
  return o;
}

double rel_drift(double x, double x0) { return std::abs(x - x0) / std::max(std::abs(x0), 1e-300); }

}  // namespace

int RunSummary::exit_code() const {
  if (status == "ok") return 0;
  if (status == "config") return 2;
  if (status == "certification") return 3;
  if (status == "numerical") return 4;
  return 1;
}

std::optional<double> RunSummary::observable(const std::string& name) const {
  for (const auto& [k, v] : observables)
    if (k == name) return v;
  return std::nullopt;
}

JsonObject RunSummary::to_json() const {
  JsonObject o;
  o.add("schema", kSummarySchema).add("status", status).add("exit_code", exit_code());
  if (stage.empty())
    o.add_null("stage");
  else
    o.add("stage", stage);
  o.add("message", message).add("out_dir", out_dir);
  JsonObject cond;
  for (const auto& it : conditions.items) cond.add(it.name, it.pass);
  o.add("conditions", cond);
  JsonObject spec;
  spec.add("certified", certified).add("negative_L1", negative_L1).add("negative_L2", negative_L2);
  spec.add("condition_F", condition_F).add("m", mass).add("dm", dmass);
  if (rho)
    spec.add("rho", *rho);
  else
    spec.add_null("rho");
  o.add("spectral", spec);
  JsonObject hor;
  hor.add("t_end", t_end).add("t_reached", t_reached).add("completed", completed);
  o.add("horizon", hor);
  JsonObject obs;
  for (const auto& [k, v] : observables) obs.add(k, v);
  o.add("observables", obs);
  if (lyapunov_ok)
    o.add("lyapunov_ok", *lyapunov_ok);
  else
    o.add_null("lyapunov_ok");
  o.add("lyapunov_checked", lyapunov_checked);
  o.add("wall_time", wall_time);
  JsonObject files;
  for (const auto& a : artifacts) files.add(std::filesystem::path(a).filename().string(), a);
  o.add("artifacts", files);
  return o;
}

ComplexField initial_perturbation(const ExperimentConfig& cfg, const RadialProfile& profile, const GridPtr& grid) {
  ComplexField q(grid);
  if (cfg.perturbation == "none" || cfg.eps0 == 0.0) return q;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  const cplx c0(normal(rng), normal(rng));
  const cplx c1(normal(rng), normal(rng));
  const double w2 = cfg.bump_width * cfg.bump_width;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto x = grid->point(i);
    double r2 = 0.0;
    for (int j = 0; j < cfg.dim; ++j) r2 += (x[j] - cfg.bump_offset) * (x[j] - cfg.bump_offset);
    const double g = std::exp(-0.5 * r2 / w2);
    q[i] = (c0 + c1 * (x[0] - cfg.bump_offset) / cfg.bump_width) * g;
  }
  const SolitonParams rest{{0.0, 0.0}, {0.0, 0.0}, 0.0, profile.mu};
  q = project_skew_orthogonal(q, tangent_frame(profile, rest, grid));
  const double h1 = h1_norm(q);
  if (!(h1 > 0.0)) throw NumericalError("perturbation vanished after projection");
  q *= cplx(cfg.eps0 / h1, 0.0);
  return q;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto clock0 = std::chrono::steady_clock::now();
  RunSummary sum;
  sum.out_dir = cfg.out_dir;
  std::string stage = "config";
  const std::string dir = cfg.out_dir;
  auto path = [&](const char* name) {
    const std::string p = (std::filesystem::path(dir) / name).string();
    sum.artifacts.push_back(p);
    return p;
  };

  try {
    cfg.validate();
    if (opt.write_outputs) {
      ensure_directory(dir);
      write_text_file(path("config.ini"), cfg.to_ini());
    }
    const NonlinearitySpec spec = cfg.nonlinearity();
    const PotentialSpec V = cfg.potential();
    const SolitonParams s0 = cfg.sigma0();
    sum.t_end = cfg.resolved_t_end();

    stage = "conditions";
    sum.conditions = verify_conditions(spec, cfg.dim);
    if (opt.write_outputs) {
      std::vector<std::pair<std::string, std::string>> items;
      for (const auto& it : sum.conditions.items)
        items.emplace_back(it.name, fmt::format("{} ({})", it.pass ? "PASS" : "FAIL", it.evidence));
      write_text_file(path("conditions.txt"), key_value_text(items));
    }
    if (!sum.conditions.all_pass()) {
      std::string failed;
      for (const auto& it : sum.conditions.items)
        if (!it.pass) failed += (failed.empty() ? "" : ", ") + it.name;
      throw CertificationError("conditions failed: " + failed);
    }

    stage = "profile";
    ProfileFamily family(spec, cfg.dim, cfg.mu_lo, cfg.mu_hi);
    const auto profile = family.at(cfg.mu);
    sum.mass = profile->mass;
    sum.dmass = profile->dmass;
    if (opt.write_outputs) {
      std::vector<std::vector<double>> rows;
      for (int i = 0; i <= 8; ++i) {
        const double mu = cfg.mu_lo + (cfg.mu_hi - cfg.mu_lo) * i / 8.0;
        const auto p = family.at(mu);
        rows.push_back({mu, p->mass, p->dmass});
      }
      write_csv(path("mass_curve.csv"), {"mu", "m", "dm"}, rows);
      write_text_file(path("profile.txt"), profile_table(*profile));
    }

    std::optional<SpectralReport> report;
    if (opt.certify) {
      stage = "certification";
      CertifyOptions co;
      co.k_max = cfg.k_max;
      co.assembly.radial_points = cfg.radial_points;
      co.coercivity.points = cfg.coercivity_points;
      report = certify(*profile, spec, co);
      sum.negative_L1 = report->negative_L1;
      sum.negative_L2 = report->negative_L2;
      sum.condition_F = report->condition_F;
      sum.rho = report->rho;
      if (opt.write_outputs) write_text_file(path("spectrum.txt"), report->to_text());
      std::string why;
      if (report->negative_L1 != 1) why = fmt::format("L1 has {} negative eigenvalues", report->negative_L1);
      else if (report->negative_L2 != 0) why = fmt::format("L2 has {} negative eigenvalues", report->negative_L2);
      else if (!report->condition_F) why = "null space condition failed: " + report->condition_F_detail;
      else if (!report->omega) why = report->omega_error;
      else if (!report->rho) why = report->rho_error;
      if (!why.empty()) throw CertificationError(why);
      sum.certified = true;
    }
    if (sum.t_end == 0.0) {
      sum.completed = true;
    } else {
      stage = "initial";
      const auto grid = make_grid(cfg.dim, cfg.n, cfg.half_extent);
      const ComplexField w0 = initial_perturbation(cfg, *profile, grid);
      ComplexField psi0 = synthesize(*profile, s0, grid);
      if (cfg.eps0 > 0.0) psi0 += frame_inverse(w0, s0);

      stage = "evolution";
      JsonlStream series, conservation;
      if (opt.write_outputs) {
        series = JsonlStream(path("timeseries.jsonl"));
        JsonObject head;
        head.add("schema", kStreamSchema).add("kind", "header").add("law", spec.describe()).add("potential", V.describe());
        head.add("eps_V", V.eps_V()).add("eps0", cfg.eps0).add("t_end", sum.t_end).add("seed", cfg.seed);
        series.write(head);
        if (report) series.write(spectrum_json(*report));
      }
      std::string snap_path;
      if (opt.write_outputs && cfg.snapshot_stride > 0) {
        snap_path = path("snapshots.bin");
        std::filesystem::remove(snap_path);
      }
      long record_index = 0;
      const auto on_record = [&](const ModulationState& st, const LyapunovRecord& ly, const AlphaRecord* al) {
        if (series.is_open()) {
          JsonObject r;
          r.add("kind", "sample").add("t", st.t).add("sigma", sigma_json(st.sigma, cfg.dim));
          r.add("w_l2", st.w_l2).add("w_h1", st.w_h1).add("iterations", st.iterations);
          r.add("constraint_residual", st.constraint_residual);
          if (al) {
            r.add("alpha", al->alpha).add("alpha_norm", al->alpha_norm).add("delta_X_norm", al->delta_X_norm);
          } else {
            r.add_null("alpha").add_null("alpha_norm").add_null("delta_X_norm");
          }
          r.add("delta_E", ly.delta_E).add("first_variation", ly.first_variation);
          if (ly.lower_bound_ok)
            r.add("lower_bound_ok", *ly.lower_bound_ok);
          else
            r.add_null("lower_bound_ok");
          series.write(r);
        }
        if (!snap_path.empty() && record_index % cfg.snapshot_stride == 0 && st.w.size() > 0) {
          const auto p = family.at(st.sigma.mu);
          ComplexField psi = synthesize(*p, st.sigma, st.w.grid_ptr());
          psi += frame_inverse(st.w, st.sigma);
          append_snapshot(snap_path, psi, st.t);
        }
        ++record_index;
      };
      TrackOptions to;
      to.decompose = cfg.decomposition();
      const auto tr = track(psi0, s0, cfg.evolution(), V, spec, family, sum.rho, to, on_record);
      sum.t_reached = tr.states.empty() ? 0.0 : tr.states.back().t;

      if (opt.write_outputs) {
        conservation = JsonlStream(path("conservation.jsonl"));
        for (const auto& c : tr.run.conservation) {
          JsonObject r;
          r.add("t", c.t).add("N", c.N).add("HV", c.HV).add("momentum", dims(c.momentum, cfg.dim));
          r.add("force", dims(c.force, cfg.dim)).add("ehrenfest", dims(c.ehrenfest, cfg.dim));
          r.add("ehrenfest_relative", c.ehrenfest_relative);
          conservation.write(r);
        }
      }

      auto& obs = sum.observables;
      if (!tr.states.empty()) {
        stage = "effective";
        const double t_flow = std::max(sum.t_end, sum.t_reached);
        const auto eff = newton_flow(s0, V, t_flow, std::min(0.01, t_flow / 100.0));
        if (opt.write_outputs) write_effective_csv(path("effective.csv"), eff);

        stage = "compare";
        std::vector<TrackedSample> ts;
        for (const auto& st : tr.states) ts.push_back({st.t, st.sigma});
        const double t_star = std::min(cfg.compare_time, sum.t_reached);
        const auto at_star = compare_trajectories(ts, eff, V, t_star);
        const auto whole = compare_trajectories(ts, eff, V);
        if (opt.write_outputs)
          write_text_file(path("deviation.txt"),
                          "[t_star]\n" + at_star.to_text() + "\n[horizon]\n" + whole.to_text());

        const ModulationState* nearest = &tr.states.front();
        for (const auto& st : tr.states)
          if (std::abs(st.t - t_star) < std::abs(nearest->t - t_star)) nearest = &st;
        double alpha_star = 0.0, alpha_all = 0.0, dx_const = 0.0;
        for (const auto& a : tr.alpha) {
          alpha_all = std::max(alpha_all, a.alpha_norm);
          if (a.t <= t_star + 1e-9) alpha_star = std::max(alpha_star, a.alpha_norm);
          dx_const = std::max(dx_const, a.delta_X_constant);
        }
        double w_sup = 0.0, resid = 0.0, dE_drift = 0.0;
        int iters = 0;
        for (const auto& st : tr.states) {
          w_sup = std::max(w_sup, st.w_h1);
          resid = std::max(resid, st.constraint_residual);
          iters = std::max(iters, st.iterations);
        }
        const double dE0 = tr.lyapunov.front().delta_E;
        int checked = 0;
        bool lb = true;
        for (const auto& l : tr.lyapunov) {
          dE_drift = std::max(dE_drift, std::abs(l.delta_E - dE0));
          if (l.lower_bound_ok) {
            ++checked;
            lb = lb && *l.lower_bound_ok;
          }
        }
        if (sum.rho) sum.lyapunov_ok = lb;
        sum.lyapunov_checked = checked;

        const auto& cons = tr.run.conservation;
        double N_drift = 0.0, HV_drift = 0.0;
        for (const auto& c : cons) {
          N_drift = std::max(N_drift, rel_drift(c.N, cons.front().N));
          HV_drift = std::max(HV_drift, rel_drift(c.HV, cons.front().HV));
        }
        const auto eh = summarize_ehrenfest(cons, V.sup_gradient());

        obs.emplace_back("t_star", t_star);
        obs.emplace_back("sup_a_tstar", at_star.sup_a);
        obs.emplace_back("sup_v_tstar", at_star.sup_v);
        obs.emplace_back("sup_gamma_tstar", at_star.sup_gamma);
        obs.emplace_back("sup_mu_tstar", at_star.sup_mu);
        obs.emplace_back("mu_drift_tstar", std::abs(nearest->sigma.mu - s0.mu));
        obs.emplace_back("sup_alpha_tstar", alpha_star);
        obs.emplace_back("sup_a_horizon", whole.sup_a);
        obs.emplace_back("sup_v_horizon", whole.sup_v);
        obs.emplace_back("sup_gamma_horizon", whole.sup_gamma);
        obs.emplace_back("sup_alpha", alpha_all);
        obs.emplace_back("sup_w_h1", w_sup);
        obs.emplace_back("w_h1_final", tr.states.back().w_h1);
        obs.emplace_back("delta_E0", std::abs(dE0));
        obs.emplace_back("delta_E_drift", dE_drift);
        obs.emplace_back("delta_X_constant", dx_const);
        obs.emplace_back("N_drift", N_drift);
        obs.emplace_back("HV_drift", HV_drift);
        obs.emplace_back("ehrenfest_integrated", eh.integrated_relative);
        obs.emplace_back("ehrenfest_max", eh.max_relative);
        obs.emplace_back("constraint_residual", resid);
        obs.emplace_back("max_iterations", iters);
        obs.emplace_back("effective_energy_drift", eff.energy_drift);
      }
      if (!tr.ok) {
        stage = "evolution";
        throw Error(tr.error_kind, tr.message);
      }
      sum.completed = true;
    }
    sum.stage.clear();
  } catch (const Error& e) {
    sum.status = status_name(e.kind());
    sum.stage = stage;
    sum.message = fmt::format("{} stage: {}", stage, e.what());
  } catch (const std::exception& e) {
    sum.status = "numerical";
    sum.stage = stage;
    sum.message = fmt::format("{} stage: {}", stage, e.what());
  }
  sum.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
  if (opt.write_outputs) {
    try {
      ensure_directory(dir);
      const std::string p = (std::filesystem::path(dir) / "summary.json").string();
      sum.artifacts.push_back(p);
      write_text_file(p, sum.to_json().str() + "\n");
    } catch (const std::exception& e) {
      if (sum.ok()) {
        sum.status = "usage";
        sum.stage = "output";
        sum.message = e.what();
      }
    }
  }
  return sum;
}

bool SweepReport::all_members_ok() const {
  return std::all_of(members.begin(), members.end(), [](const SweepMember& m) { return m.ok; });
}

const OrderFit* SweepReport::find(const std::string& observable) const {
  for (const auto& f : fits)
    if (f.observable == observable) return &f;
  return nullptr;
}

JsonObject SweepReport::to_json() const {
  JsonObject o;
  o.add("schema", kSummarySchema).add("kind", "sweep").add("parameter", parameter).add("all_members_ok", all_members_ok());
  std::vector<JsonObject> ms;
  for (const auto& m : members) {
    JsonObject j;
    j.add("value", m.value).add("ok", m.ok).add("status", m.status).add("message", m.message);
    JsonObject obs;
    for (const auto& [k, v] : m.observables) obs.add(k, v);
    j.add("observables", obs);
    ms.push_back(std::move(j));
  }
  o.add("members", ms);
  std::vector<JsonObject> fs;
  for (const auto& f : fits) {
    JsonObject j;
    j.add("observable", f.observable).add("ok", f.ok);
    if (f.ok) {
      j.add("slope", f.fit.slope).add("slope_stderr", f.fit.slope_stderr).add("r2", f.fit.r2).add("points", f.fit.points);
    }
    j.add("note", f.note);
    fs.push_back(std::move(j));
  }
  o.add("fits", fs);
  return o;
}

std::string SweepReport::to_text() const {
  std::string s = fmt::format("parameter: {}\n", parameter);
  for (const auto& m : members)
    s += fmt::format("member {:.6g}: {}{}\n", m.value, m.ok ? "ok" : "FAILED", m.ok ? "" : " (" + m.message + ")");
  for (const auto& f : fits) {
    if (f.ok)
      s += fmt::format("{}: slope {:.4f} +/- {:.4f}, R2 {:.4f}\n", f.observable, f.fit.slope, f.fit.slope_stderr, f.fit.r2);
    else
      s += fmt::format("{}: no fit ({})\n", f.observable, f.note);
  }
  return s;
}

SweepReport sweep_orders(const ExperimentConfig& base, const std::string& parameter, const std::vector<double>& values,
                         const std::vector<std::string>& observables, int workers, const RunOptions& opt) {
  if (values.size() < 3) throw ConfigError("sweep needs at least three values");
  for (double v : values)
    if (!(v > 0.0)) throw ConfigError("sweep values must be positive");
  const double ratio = values[1] / values[0];
  for (std::size_t i = 2; i < values.size(); ++i)
    if (std::abs(values[i] / values[i - 1] / ratio - 1.0) > 1e-6)
      throw ConfigError("sweep values must be geometrically spaced");

  if (parameter != "eps_V" && parameter != "eps_0" && parameter != "dt")
    throw ConfigError(fmt::format("unknown sweep parameter '{}' (expected eps_V, eps_0 or dt)", parameter));

  SweepReport rep;
  rep.parameter = parameter;
  rep.members.resize(values.size());
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(values.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      auto& m = rep.members[i];
      m.value = values[i];
      ExperimentConfig c = base;
      c.out_dir = (std::filesystem::path(base.out_dir) / fmt::format("{}_{:02d}", parameter, i)).string();
      try {
        set_parameter(c, parameter, values[i]);
      } catch (const Error& e) {
        m.ok = false;
        m.status = status_name(e.kind());
        m.message = e.what();
        continue;
      }
      const auto s = run_experiment(c, opt);
      m.ok = s.ok();
      m.status = s.status;
      m.message = s.message;
      m.observables = s.observables;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& name : observables) {
    OrderFit f;
    f.observable = name;
    std::vector<double> x, y;
    for (const auto& m : rep.members) {
      if (!m.ok) continue;
      for (const auto& [k, v] : m.observables)
        if (k == name && std::isfinite(v) && v > 0.0) {
          x.push_back(m.value);
          y.push_back(v);
        }
    }
    if (x.size() < 2) {
      f.note = fmt::format("only {} usable members", x.size());
    } else {
      f.fit = fit_loglog(x, y);
      f.ok = true;
      if (x.size() < values.size()) f.note = fmt::format("partial: {} of {} members", x.size(), values.size());
    }
    rep.fits.push_back(std::move(f));
  }

  if (opt.write_outputs) {
    ensure_directory(base.out_dir);
    write_text_file((std::filesystem::path(base.out_dir) / "sweep.json").string(), rep.to_json().str() + "\n");
    write_text_file((std::filesystem::path(base.out_dir) / "sweep.txt").string(), rep.to_text());
    std::vector<std::string> header{parameter};
    for (const auto& name : observables) header.push_back(name);
    std::vector<std::vector<double>> rows;
    for (const auto& m : rep.members) {
      std::vector<double> row{m.value};
      for (const auto& name : observables) {
        double v = std::nan("");
        for (const auto& [k, val] : m.observables)
          if (k == name) v = val;
        row.push_back(v);
      }
      rows.push_back(std::move(row));
    }
    write_csv((std::filesystem::path(base.out_dir) / "sweep.csv").string(), header, rows);
  }
  return rep;
}

}  // namespace nlsdyn
