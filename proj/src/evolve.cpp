#include "nlsdyn/evolve.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include <fmt/format.h>

#include "nlsdyn/spectral.hpp"

namespace nlsdyn {
double EvolutionConfig::stiffness(const SpatialGrid& g) const {
  const double k = g.k_max();
  return dt * g.dim() * k * k;
}

void EvolutionConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError(fmt::format("evolution.dt must be positive (got {})", dt));
  if (!(t_end >= 0.0)) throw ConfigError(fmt::format("evolution.t_end must be non-negative (got {})", t_end));
  if (stride < 1) throw ConfigError(fmt::format("evolution.stride must be at least 1 (got {})", stride));
  if (!(mass_tolerance > 0.0) || !(energy_tolerance > 0.0))
    throw ConfigError("evolution drift tolerances must be positive");
}

StrangStepper::StrangStepper(NonlinearitySpec spec, const PotentialSpec& V, GridPtr grid, double dt, bool dealias)
    : spec_(std::move(spec)), grid_(std::move(grid)), V_(V.sample(grid_)), dt_(dt) {
  const int n = grid_->n();
  const auto k = grid_->wavenumbers();
  const double cut = 2.0 / 3.0 * grid_->k_max();
  kinetic_.resize(grid_->size());
  for (std::size_t idx = 0; idx < grid_->size(); ++idx) {
    double k2 = 0.0;
    bool keep = true;
    if (grid_->dim() == 1) {
      k2 = k[idx] * k[idx];
      keep = std::abs(k[idx]) <= cut;
    } else {
      const auto kx = k[idx / n], ky = k[idx % n];
      k2 = kx * kx + ky * ky;
      keep = std::abs(kx) <= cut && std::abs(ky) <= cut;
    }
    kinetic_[idx] = (dealias && !keep) ? 0.0L : std::polar(1.0L, -static_cast<long double>(k2) * dt_);
  }
}

void StrangStepper::phase(ComplexField& psi, double tau) const {
  const RealField M = nonlinear_multiplier(spec_, psi);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= std::polar(1.0, tau * (M[i] - V_[i]));
}

void StrangStepper::step(ComplexField& psi) const {
  require_same_grid(psi.grid(), *grid_, "strang_step");
  phase(psi, 0.5 * dt_);
  fourier_multiply_extended(*grid_, psi.data(), kinetic_, work_);
  phase(psi, 0.5 * dt_);
}

ComplexField strang_step(const ComplexField& psi, double dt, const PotentialSpec& V, const NonlinearitySpec& spec) {
  if (!psi.all_finite()) throw NumericalError("strang_step: non-finite input");
  StrangStepper stepper(spec, V, psi.grid_ptr(), dt);
  ComplexField out = psi;
  stepper.step(out);
  if (!out.all_finite()) throw NumericalError("strang_step: non-finite output");
  return out;
}

std::array<double, 2> peak_location(const ComplexField& psi) {
  std::size_t best = 0;
  double peak = -1.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a = std::norm(psi[i]);
    if (a > peak) {
      peak = a;
      best = i;
    }
  }
  return psi.grid().point(best);
}

ConservationRecord conservation_sample(double t, const ComplexField& psi, const NonlinearitySpec& spec,
                                       const PotentialSpec& V, const RealField& Vgrid) {
  ConservationRecord rec;
  rec.t = t;
  const auto f = functionals(spec, psi, Vgrid, 0.0);
  rec.N = f.mass_N;
  rec.HV = f.energy_HV;
  rec.momentum = f.momentum;
  const auto& g = psi.grid();
  for (int j = 0; j < g.dim(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += V.gradient(g.point(i))[j] * std::norm(psi[i]);
    rec.force[j] = -s * g.cell_volume();
  }
  return rec;
}

void invariant_monitor(std::vector<ConservationRecord>& records, double sup_gradient) {
  const std::size_t n = records.size();
  if (n < 3) return;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dt = records[i + 1].t - records[i - 1].t;
    double mag = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double dP = (records[i + 1].momentum[j] - records[i - 1].momentum[j]) / dt;
      records[i].ehrenfest[j] = dP - records[i].force[j];
      mag += records[i].ehrenfest[j] * records[i].ehrenfest[j];
    }
    const double scale = sup_gradient * 2.0 * records[i].N;
    records[i].ehrenfest_relative = scale > 0.0 ? std::sqrt(mag) / scale : std::sqrt(mag);
  }
  records.front().ehrenfest = records[1].ehrenfest;
  records.front().ehrenfest_relative = records[1].ehrenfest_relative;
  records.back().ehrenfest = records[n - 2].ehrenfest;
  records.back().ehrenfest_relative = records[n - 2].ehrenfest_relative;
}

EhrenfestSummary summarize_ehrenfest(const std::vector<ConservationRecord>& records, double sup_gradient) {
  EhrenfestSummary s;
  if (records.size() < 3) return s;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double w = 0.5 * (records[i + 1].t - records[i - 1].t);
    const double r = std::hypot(records[i].ehrenfest[0], records[i].ehrenfest[1]);
    num += w * r;
    den += w * sup_gradient * 2.0 * records[i].N;
    s.max_relative = std::max(s.max_relative, records[i].ehrenfest_relative);
  }
  s.integrated_absolute = num;
  s.integrated_relative = den > 0.0 ? num / den : num;
  return s;
}

RunResult evolve_run(const ComplexField& psi0, const EvolutionConfig& cfg, const PotentialSpec& V,
                     const NonlinearitySpec& spec, const std::vector<Observer>& observers) {
  cfg.validate();
  if (!psi0.all_finite()) throw NumericalError("evolve_run: non-finite initial data");
  const auto& g = psi0.grid();
  const long steps = cfg.t_end > 0.0 ? static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9)) : 0;
  const double dt = steps > 0 ? cfg.t_end / steps : cfg.dt;
  StrangStepper stepper(spec, V, psi0.grid_ptr(), dt, cfg.dealias);

  RunResult res;
  res.psi = psi0;
  ComplexField last_good = psi0;
  const double margin = cfg.guard_mu > 0.0 ? 10.0 / std::sqrt(cfg.guard_mu) : 0.0;

  auto fail = [&](Error::Kind kind, std::string msg) {
    res.ok = false;
    res.error_kind = kind;
    res.message = std::move(msg);
    res.psi = last_good;
  };
  auto sample = [&](long step) {
    const double t = step * dt;
    res.conservation.push_back(conservation_sample(t, res.psi, spec, V, stepper.potential()));
    const auto& rec = res.conservation.back();
    const auto& first = res.conservation.front();
    if (cfg.guard_mu > 0.0) {
      const auto peak = peak_location(res.psi);
      for (int j = 0; j < g.dim(); ++j) {
        if (std::abs(peak[j]) + margin > g.half_extent()) {
          fail(Error::Kind::numerical, fmt::format("soliton reached boundary at t={:.6g} (peak x_{}={:.6g})", t, j, peak[j]));
          return false;
        }
      }
    }
    const double dN = std::abs(rec.N - first.N) / std::max(std::abs(first.N), 1e-300);
    const double dH = std::abs(rec.HV - first.HV) / std::max(std::abs(first.HV), 1e-300);
    if (dN > cfg.mass_tolerance || dH > cfg.energy_tolerance) {
      fail(Error::Kind::numerical,
           fmt::format("integrator accuracy exhausted at t={:.6g} (relative drift N {:.3e}, H_V {:.3e})", t, dN, dH));
      return false;
    }
    for (const auto& obs : observers)
      if (!obs(t, res.psi, step)) return false;
    return true;
  };

  if (!sample(0)) return res;
  for (long s = 1; s <= steps; ++s) {
    last_good = res.psi;
    stepper.step(res.psi);
    res.steps = s;
    res.t = s * dt;
    if (!res.psi.all_finite()) {
      res.steps = s - 1;
      res.t = (s - 1) * dt;
      fail(Error::Kind::numerical, fmt::format("non-finite field at t={:.6g}", s * dt));
      return res;
    }
    if (s % cfg.stride == 0 || s == steps) {
      if (!sample(s)) return res;
    }
  }
  invariant_monitor(res.conservation, V.sup_gradient());
  return res;
}

void append_snapshot(const std::string& path, const ComplexField& psi, double t) {
  std::ofstream os(path, std::ios::binary | std::ios::app);
  if (!os) throw UsageError(fmt::format("cannot open snapshot file {}", path));
  const auto& g = psi.grid();
  const std::int64_t header[2] = {g.n(), g.dim()};
  const double meta[2] = {g.half_extent(), t};
  os.write(reinterpret_cast<const char*>(header), sizeof header);
  os.write(reinterpret_cast<const char*>(meta), sizeof meta);
  os.write(reinterpret_cast<const char*>(psi.data()), static_cast<std::streamsize>(psi.size() * sizeof(cplx)));
}

std::vector<Snapshot> read_snapshots(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError(fmt::format("cannot open snapshot file {}", path));
  std::vector<Snapshot> out;
  while (true) {
    std::int64_t header[2];
    double meta[2];
    if (!is.read(reinterpret_cast<char*>(header), sizeof header)) break;
    if (!is.read(reinterpret_cast<char*>(meta), sizeof meta)) throw UsageError("truncated snapshot header");
    Snapshot s;
    s.n = static_cast<int>(header[0]);
    s.d = static_cast<int>(header[1]);
    s.half_extent = meta[0];
    s.t = meta[1];
    std::size_t count = 1;
    for (int j = 0; j < s.d; ++j) count *= static_cast<std::size_t>(s.n);
    s.values.resize(count);
    if (!is.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(count * sizeof(cplx))))
      throw UsageError("truncated snapshot payload");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace nlsdyn
