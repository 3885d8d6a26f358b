#include "nlsdyn/effective.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "nlsdyn/error.hpp"

namespace nlsdyn {
namespace {

using State = std::array<double, 6>;  // a0 a1 v0 v1 γ μ

State pack(const SolitonParams& s) { return {s.a[0], s.a[1], s.v[0], s.v[1], s.gamma, s.mu}; }

SolitonParams unpack(const State& y) { return {{y[0], y[1]}, {y[2], y[3]}, y[4], y[5]}; }

State axpy(const State& y, double h, const State& k) {
  State out;
  for (int i = 0; i < 6; ++i) out[i] = y[i] + h * k[i];
  return out;
}

double hermite(double y0, double y1, double d0, double d1, double h, double s) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

}  // namespace

State newton_rhs(const PotentialSpec& V, const SolitonParams& s) {
  const auto g = V.gradient(s.a);
  const double v2 = s.v[0] * s.v[0] + s.v[1] * s.v[1];
  return {s.v[0], s.v[1], -2.0 * g[0], -2.0 * g[1], s.mu + 0.25 * v2 - V.value(s.a), 0.0};
}

SolitonParams newton_step(const PotentialSpec& V, const SolitonParams& s, double dt) {
  const State y = pack(s);
  const State k1 = newton_rhs(V, s);
  const State k2 = newton_rhs(V, unpack(axpy(y, 0.5 * dt, k1)));
  const State k3 = newton_rhs(V, unpack(axpy(y, 0.5 * dt, k2)));
  const State k4 = newton_rhs(V, unpack(axpy(y, dt, k3)));
  State out;
  for (int i = 0; i < 6; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  if (V.dim() == 1) out[1] = out[3] = 0.0;
  return unpack(out);
}

double particle_energy(const PotentialSpec& V, const SolitonParams& s) {
  return 0.25 * (s.v[0] * s.v[0] + s.v[1] * s.v[1]) + V.value(s.a);
}

EffectiveTrajectory newton_flow(const SolitonParams& sigma0, const PotentialSpec& V, double t_end, double dt) {
  if (!(dt > 0.0)) throw UsageError(fmt::format("newton_flow: dt must be positive (got {})", dt));
  EffectiveTrajectory tr;
  tr.dim = V.dim();
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t_end) / dt - 1e-9)));
  const double h = t_end / steps;
  tr.dt = std::abs(h);
  tr.t.reserve(steps + 1);
  tr.sigma.reserve(steps + 1);
  SolitonParams s = sigma0;
  tr.t.push_back(0.0);
  tr.sigma.push_back(s);
  const double e0 = particle_energy(V, s);
  for (long i = 1; i <= steps; ++i) {
    s = newton_step(V, s, h);
    tr.t.push_back(i * h);
    tr.sigma.push_back(s);
    tr.energy_drift = std::max(tr.energy_drift, std::abs(particle_energy(V, s) - e0));
  }
  return tr;
}

SolitonParams EffectiveTrajectory::at(double time, const PotentialSpec& V) const {
  if (t.empty()) throw UsageError("empty effective trajectory");
  const bool forward = t.back() >= t.front();
  const double lo = forward ? t.front() : t.back(), hi = forward ? t.back() : t.front();
  if (time < lo - 1e-9 || time > hi + 1e-9)
    throw UsageError(fmt::format("time {} outside the effective trajectory window [{}, {}]", time, lo, hi));
  const double u = (time - t.front()) / (t.back() - t.front()) * (t.size() - 1);
  std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(t.size() - 2)));
  if (t.size() == 1) return sigma[0];
  const double h = t[i + 1] - t[i];
  const double s = (time - t[i]) / h;
  const auto& p = sigma[i];
  const auto& q = sigma[i + 1];
  const auto dp = newton_rhs(V, p), dq = newton_rhs(V, q);
  SolitonParams out;
  for (int j = 0; j < 2; ++j) {
    out.a[j] = hermite(p.a[j], q.a[j], dp[j], dq[j], h, s);
    out.v[j] = hermite(p.v[j], q.v[j], dp[2 + j], dq[2 + j], h, s);
  }
  out.gamma = hermite(p.gamma, q.gamma, dp[4], dq[4], h, s);
  out.mu = p.mu;
  return out;
}

DeviationReport compare_trajectories(const std::vector<TrackedSample>& tracked, const EffectiveTrajectory& eff,
                                     const PotentialSpec& V, double t_stop) {
  if (tracked.empty()) throw UsageError("compare_trajectories: no tracked samples");
  const double hi = std::max(eff.t.front(), eff.t.back());
  DeviationReport rep;
  rep.t_start = tracked.front().t;
  rep.t_stop = tracked.front().t;
  const double mu0 = eff.sigma.front().mu;
  for (const auto& smp : tracked) {
    if (t_stop >= 0.0 && smp.t > t_stop + 1e-9) break;
    if (smp.t > hi + 1e-9)
      throw UsageError(fmt::format("compare_trajectories: tracked time {} beyond effective window {}", smp.t, hi));
    const auto n = eff.at(smp.t, V);
    for (int j = 0; j < eff.dim; ++j) {
      rep.sup_a = std::max(rep.sup_a, std::abs(smp.sigma.a[j] - n.a[j]));
      rep.sup_v = std::max(rep.sup_v, std::abs(smp.sigma.v[j] - n.v[j]));
    }
    const double dg = smp.sigma.gamma - n.gamma;
    rep.sup_gamma = std::max(rep.sup_gamma, std::abs(dg));
    rep.sup_gamma_mod = std::max(rep.sup_gamma_mod, std::abs(std::remainder(dg, 2.0 * std::numbers::pi)));
    rep.sup_mu = std::max(rep.sup_mu, std::abs(smp.sigma.mu - mu0));
    rep.t_stop = smp.t;
    ++rep.samples;
  }
  return rep;
}

std::string DeviationReport::to_text() const {
  return fmt::format(
      "window: {:.17g} {:.17g}\nsamples: {}\nsup_a: {:.17g}\nsup_v: {:.17g}\nsup_gamma: {:.17g}\n"
      "sup_gamma_mod: {:.17g}\nsup_mu: {:.17g}\n",
      t_start, t_stop, samples, sup_a, sup_v, sup_gamma, sup_gamma_mod, sup_mu);
}

void write_effective_csv(const std::string& path, const EffectiveTrajectory& eff) {
  std::ofstream os(path);
  if (!os) throw UsageError(fmt::format("cannot write {}", path));
  os << (eff.dim == 1 ? "t,a,v,gamma,mu\n" : "t,a0,a1,v0,v1,gamma,mu\n");
  for (std::size_t i = 0; i < eff.t.size(); ++i) {
    const auto& s = eff.sigma[i];
    if (eff.dim == 1)
      os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", eff.t[i], s.a[0], s.v[0], s.gamma, s.mu);
    else
      os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", eff.t[i], s.a[0], s.a[1], s.v[0],
                        s.v[1], s.gamma, s.mu);
  }
}

}  // namespace nlsdyn
