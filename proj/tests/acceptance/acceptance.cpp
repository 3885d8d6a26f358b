// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <fmt/core.h>
#include <json.hpp>

#include "nlsdyn/config.hpp"
#include "nlsdyn/error.hpp"
#include "nlsdyn/experiment.hpp"
#include "nlsdyn/fit.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/linearization.hpp"
#include "nlsdyn/modulation.hpp"
#include "nlsdyn/profile.hpp"
#include "nlsdyn/profile_family.hpp"
#include "nlsdyn/spectral.hpp"

using namespace nlsdyn;
namespace fs = std::filesystem;

namespace {

const NonlinearitySpec cubic = NonlinearitySpec::power(1.0, 1.0);

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s  [%2d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

// Runs a criterion body; an exception counts as failure.
void criterion(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(id, name, pass, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const fs::path& workdir() {
  static const fs::path p = [] {
    auto d = fs::temp_directory_path() / "nlsdyn_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

const char* kCosine = R"(
[grid]
dim = 1
n = 2048
half_extent = 60
[nonlinearity]
law = power
s = 1
[potential]
family = cosine
amplitude = -0.5
eps_V = 0.05
[initial]
a_phase = 1
mu = 1
[evolution]
dt = 0.005
horizon = 2
stride = 20
compare_time = 20
[output]
seed = 1
)";

double fit_slope(const SweepReport& rep, const std::string& obs, double* r2 = nullptr) {
  const auto* f = rep.find(obs);
  if (!f || !f->ok) throw Error(Error::Kind::numerical, "no fit for " + obs);
  if (r2) *r2 = f->fit.r2;
  return f->fit.slope;
}

double member_max(const SweepReport& rep, const std::string& obs) {
  double m = 0.0;
  for (const auto& mem : rep.members)
    for (const auto& [k, v] : mem.observables)
      if (k == obs) m = std::max(m, v);
  return m;
}

const SweepReport& order_sweep() {
  static const SweepReport rep = [] {
    auto base = parse_config(kCosine);
    base.out_dir = (workdir() / "orders").string();
    return sweep_orders(base, "eps_V", {0.1, 0.05, 0.025},
                        {"sup_a_tstar", "sup_alpha_tstar", "sup_a_horizon", "sup_w_h1", "mu_drift_tstar",
                         "ehrenfest_integrated", "N_drift"},
                        1);
  }();
  return rep;
}

double order_sweep_seconds = 0.0;

}  // namespace

int main() {
  RadialProfile profile;
  criterion(1, "profile oracle", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    profile = solve_profile(cubic, 1.0, 1);
    const double dt = seconds_since(t0);
    double err = 0.0;
    for (std::size_t i = 0; i < profile.size() && profile.r[i] <= 20.0; ++i)
      err = std::max(err, std::abs(profile.eta.f[i] - std::sqrt(2.0) / std::cosh(profile.r[i])));
    return std::pair{err < 1e-8 && dt < 1.0, fmt::format("sup err {:.3e} on r<=20, {:.3f} s", err, dt)};
  });

  criterion(2, "mass curve", [&] {
    const auto mc = mass_curve(cubic, {0.5, 1.0, 2.0}, 1);
    double rel = 0.0;
    for (std::size_t i = 0; i < mc.mu.size(); ++i)
      rel = std::max(rel, std::abs(mc.m[i] - 2.0 * std::sqrt(mc.mu[i])) / (2.0 * std::sqrt(mc.mu[i])));
    const auto quintic = mass_curve(NonlinearitySpec::power(3.0, 1.0), {1.0}, 1);
    const bool pass = rel < 1e-6 && std::abs(mc.dm[1] - 1.0) < 1e-5 && mc.stable && !quintic.stable &&
                      quintic.dm[0] < 0.0;
    return std::pair{pass, fmt::format("max rel err {:.3e}, m'(1) = {:.8f}, s=3 m' = {:.4f} ({})", rel, mc.dm[1],
                                       quintic.dm[0], quintic.stable ? "stable" : "unstable")};
  });

  SpectralReport spec;
  criterion(3, "Poschl-Teller spectrum", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    spec = certify(profile, cubic);
    const double dt = seconds_since(t0);
    const bool eig = spec.lowest_L1.size() >= 2 && std::abs(spec.lowest_L1[0] + 3.0) < 1e-4 &&
                     std::abs(spec.lowest_L1[1]) < 1e-4;
    const bool pass = eig && spec.negative_L1 == 1 && std::abs(spec.zero_eigenvalue_L2) < 1e-5 &&
                      spec.zero_overlap_L2 > 0.999 && dt < 10.0;
    return std::pair{pass, fmt::format("L1 {{{:.7f}, {:.2e}}}, negatives {}, L2 min {:.2e}, overlap {:.7f}, {:.2f} s",
                                       spec.lowest_L1.at(0), spec.lowest_L1.at(1), spec.negative_L1,
                                       spec.zero_eigenvalue_L2, spec.zero_overlap_L2, dt)};
  });

  criterion(4, "zero-mode algebra", [&] {
    double m = 0.0;
    for (double r : spec.algebra_residual) m = std::max(m, r);
    return std::pair{m < 1e-6, fmt::format("max residual {:.3e} ({:.1e}, {:.1e}, {:.1e}, {:.1e})", m,
                                           spec.algebra_residual[0], spec.algebra_residual[1],
                                           spec.algebra_residual[2], spec.algebra_residual[3])};
  });

  criterion(5, "symplectic matrix", [&] {
    if (!spec.omega) return std::pair{false, std::string("no matrix: ") + spec.omega_error};
    // m = 2, m' = 1: translations pair with boosts, gauge with scaling
    const double expected[4][4] = {{0, -2, 0, 0}, {2, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
    double pattern = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) pattern = std::max(pattern, std::abs(spec.omega->omega_inv(i, j) - expected[i][j]));
    const auto g = make_grid(1, 2048, 60.0);
    const auto base = omega_matrix(tangent_frame(profile, SolitonParams{}, g), profile);
    double inv = 0.0;
    for (const SolitonParams s : {SolitonParams{{5.0, 0.0}, {0.0, 0.0}, 0.0, 1.0},
                                  SolitonParams{{0.0, 0.0}, {0.7, 0.0}, 0.0, 1.0},
                                  SolitonParams{{-3.0, 0.0}, {-0.5, 0.0}, 2.0, 1.0}}) {
      const auto moved = omega_matrix(tangent_frame(profile, s, g), profile);
      inv = std::max(inv, (base.omega_inv - moved.omega_inv).cwiseAbs().maxCoeff());
    }
    return std::pair{pattern < 1e-8 && inv < 1e-8,
                     fmt::format("pattern deviation {:.3e}, invariance deviation {:.3e}", pattern, inv)};
  });

  criterion(6, "coercivity", [&] {
    if (!spec.rho) return std::pair{false, std::string("no coercivity constant")};
    const double rho = *spec.rho, rel = std::abs(spec.rho_refined - rho) / rho;
    return std::pair{rho > 0.0 && rel < 0.01 && rho <= spec.mu,
                     fmt::format("rho {:.6f}, refined {:.6f} (rel {:.2e}), mu {}", rho, spec.rho_refined, rel, spec.mu)};
  });

  RunSummary free_run;
  criterion(7, "free-soliton transport", [&] {
    ExperimentConfig c;
    c.family = "zero";
    c.n = 2048;
    c.half_extent = 60.0;
    c.dt = 0.005;
    c.t_end = 50.0;
    c.a = {-10.0, 0.0};
    c.v = {0.4, 0.0};
    c.out_dir = (workdir() / "free").string();
    free_run = run_experiment(c);
    if (!free_run.ok()) return std::pair{false, free_run.stage + ": " + free_run.message};
    const double da = *free_run.observable("sup_a_horizon"), w = *free_run.observable("sup_w_h1"),
                 dg = *free_run.observable("sup_gamma_horizon");
    return std::pair{da < 1e-3 && w < 1e-3 && dg < 1e-3,
                     fmt::format("sup|a-vt| {:.3e}, sup||w||H1 {:.3e}, gamma drift {:.3e}", da, w, dg)};
  });

  criterion(8, "conservation", [&] {
    // mass: free run has exactly 10^4 steps
    const double steps_free = free_run.t_end / 0.005;
    double n_drift = *free_run.observable("N_drift") / (steps_free / 1e4);
    // energy: dt sweep of the cosine experiment over a fixed window
    auto base = parse_config(kCosine);
    base.t_end = 10.0;
    base.out_dir = (workdir() / "dt_sweep").string();
    RunOptions o;
    o.certify = false;
    const auto rep = sweep_orders(base, "dt", {0.01, 0.005, 0.0025}, {"HV_drift", "N_drift"}, 1, o);
    for (const auto& m : rep.members)
      for (const auto& [k, v] : m.observables)
        if (k == "N_drift") n_drift = std::max(n_drift, v / (10.0 / m.value / 1e4));
    const double hv = fit_slope(rep, "HV_drift");
    // Ehrenfest on the main experiment
    const auto t0 = std::chrono::steady_clock::now();
    const auto& orders = order_sweep();
    order_sweep_seconds = seconds_since(t0);
    const double ehr = member_max(orders, "ehrenfest_integrated");
    const bool pass = rep.all_members_ok() && orders.all_members_ok() && n_drift < 1e-12 &&
                      std::abs(hv - 2.0) <= 0.2 && ehr < 1e-3;
    return std::pair{pass, fmt::format("N drift {:.2e} per 1e4 steps, H_V order {:.3f}, Ehrenfest {:.2e}", n_drift,
                                       hv, ehr)};
  });

  criterion(9, "Newton-tracking orders", [&] {
    const auto& rep = order_sweep();
    double r2a = 0.0, r2al = 0.0;
    const double sa = fit_slope(rep, "sup_a_tstar", &r2a), sal = fit_slope(rep, "sup_alpha_tstar", &r2al),
                 sh = fit_slope(rep, "sup_a_horizon");
    const bool pass = rep.all_members_ok() && sa >= 1.5 && r2a > 0.95 && sal >= 1.5 && r2al > 0.95 && sh >= 0.9 &&
                      order_sweep_seconds < 900.0;
    return std::pair{pass, fmt::format("sup|a-aN| order {:.3f} (R2 {:.4f}), sup|alpha| order {:.3f} (R2 {:.4f}), "
                                       "horizon order {:.3f}, {:.0f} s",
                                       sa, r2a, sal, r2al, sh, order_sweep_seconds)};
  });

  criterion(10, "fluctuation bound", [&] {
    const auto& rep = order_sweep();
    const double sw = fit_slope(rep, "sup_w_h1"), sm = fit_slope(rep, "mu_drift_tstar");
    return std::pair{rep.all_members_ok() && sw >= 0.9 && sm >= 1.5,
                     fmt::format("sup||w||H1 order {:.3f}, mu drift order {:.3f}", sw, sm)};
  });

  criterion(11, "initial-energy bound", [&] {
    auto base = parse_config(kCosine);
    base.t_end = 1.0;
    base.perturbation = "bump";
    base.eps0 = 0.02;
    base.seed = 7;
    base.out_dir = (workdir() / "eps0_sweep").string();
    const auto rep = sweep_orders(base, "eps_0", {0.01, 0.02, 0.04}, {"delta_E0"}, 1);
    double r2 = 0.0;
    const double s = fit_slope(rep, "delta_E0", &r2);
    return std::pair{rep.all_members_ok() && s >= 1.8, fmt::format("|dE(0)| order {:.4f} (R2 {:.5f})", s, r2)};
  });

  criterion(12, "Lyapunov lower bound", [&] {
    // read back the streamed samples of the order-sweep members
    const auto& rep = order_sweep();
    int checked = 0, violations = 0;
    for (std::size_t i = 0; i < rep.members.size(); ++i) {
      const auto dir = workdir() / "orders" / fmt::format("eps_V_{:02d}", i);
      std::ifstream sj(dir / "summary.json");
      const auto summary = nlohmann::json::parse(sj);
      const double rho = summary["spectral"]["rho"].get<double>();
      std::ifstream ts(dir / "timeseries.jsonl");
      std::string line;
      while (std::getline(ts, line)) {
        const auto j = nlohmann::json::parse(line);
        if (j["kind"] != "sample") continue;
        const double w = j["w_h1"].get<double>();
        if (w > 0.05) continue;
        ++checked;
        if (j["delta_E"].get<double>() < 0.25 * rho * w * w) ++violations;
      }
    }
    return std::pair{checked > 0 && violations == 0,
                     fmt::format("{} samples with ||w||H1 <= 0.05, {} violations", checked, violations)};
  });

  criterion(13, "decomposition contract", [&] {
    const ProfileFamily family(cubic, 1, 0.5, 2.0);
    const auto g = make_grid(1, 2048, 60.0);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> n;
    double sigma_err = 0.0, resid = 0.0;
    for (int c = 0; c < 100; ++c) {
      const SolitonParams s{{10.0 * u(rng), 0.0}, {0.6 * u(rng), 0.0}, std::numbers::pi * u(rng), 1.1 + 0.4 * u(rng)};
      const auto& prof = *family.at(s.mu);
      const cplx c0(n(rng), n(rng)), c1(n(rng), n(rng));
      const double off = u(rng), width = 1.0 + 0.5 * u(rng), size = std::pow(10.0, -3.0 + u(rng));
      ComplexField q(g);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double x = g->point(i)[0] - s.a[0];
        q[i] = (c0 + c1 * x / width) * std::exp(-0.5 * (x - off) * (x - off) / (width * width));
      }
      q = project_skew_orthogonal(q, tangent_frame(prof, s, g));
      q *= cplx(size / h1_norm(q));
      const auto psi = synthesize(prof, s, g) + q;
      SolitonParams guess = s;
      guess.a[0] += 0.05 * u(rng);
      guess.v[0] += 0.02 * u(rng);
      guess.gamma += 0.05 * u(rng);
      guess.mu += 0.02 * u(rng);
      const auto st = decompose(psi, guess, family);
      sigma_err = std::max({sigma_err, std::abs(st.sigma.a[0] - s.a[0]), std::abs(st.sigma.v[0] - s.v[0]),
                            std::abs(std::remainder(st.sigma.gamma - s.gamma, 2 * std::numbers::pi)),
                            std::abs(st.sigma.mu - s.mu)});
      resid = std::max(resid, st.constraint_residual / l2_norm(synthesize(*family.at(st.sigma.mu), SolitonParams{
                                                                   {0.0, 0.0}, {0.0, 0.0}, 0.0, st.sigma.mu}, g)));
    }
    return std::pair{sigma_err < 1e-8 && resid < 1e-10,
                     fmt::format("max sigma error {:.3e}, max constraint residual {:.3e} ||eta||", sigma_err, resid)};
  });

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
