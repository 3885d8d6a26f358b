#include "nlsdyn/frame.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nlsdyn/error.hpp"
#include "nlsdyn/spectral.hpp"

namespace nlsdyn {
namespace {

double wrap(double y, double L) {
  const double period = 2.0 * L;
  y = std::fmod(y + L, period);
  if (y < 0.0) y += period;
  return y - L;
}

void check_mu(const RadialProfile& p, const SolitonParams& s, const char* where) {
  if (std::abs(p.mu - s.mu) > 1e-12 * std::max(1.0, s.mu))
    throw UsageError(fmt::format("{}: profile has mu={} but sigma has mu={}", where, p.mu, s.mu));
}

// Calls fn(idx, y, r, phase) for each grid point.
template <typename Fn>
void for_each_point(const SpatialGrid& g, const SolitonParams& s, Fn&& fn) {
  const double L = g.half_extent();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto x = g.point(idx);
    std::array<double, 2> y{wrap(x[0] - s.a[0], L), g.dim() == 2 ? wrap(x[1] - s.a[1], L) : 0.0};
    const double r = std::hypot(y[0], y[1]);
    const cplx phase = std::polar(1.0, 0.5 * (s.v[0] * y[0] + s.v[1] * y[1]) + s.gamma);
    fn(idx, y, r, phase);
  }
}

}  // namespace

void check_guard(const SpatialGrid& grid, const SolitonParams& sigma, const char* where) {
  const double margin = 10.0 / std::sqrt(sigma.mu);
  for (int j = 0; j < grid.dim(); ++j) {
    if (std::abs(sigma.a[j]) + margin > grid.half_extent())
      throw NumericalError(fmt::format("{}: soliton reached boundary (|a_{}|={:.6g}, margin {:.6g}, half-extent {:.6g})",
                                       where, j, std::abs(sigma.a[j]), margin, grid.half_extent()));
  }
}

ComplexField synthesize(const RadialProfile& profile, const SolitonParams& sigma, const GridPtr& grid) {
  check_mu(profile, sigma, "synthesize");
  check_guard(*grid, sigma, "synthesize");
  ComplexField out(grid);
  for_each_point(*grid, sigma, [&](std::size_t idx, const std::array<double, 2>&, double r, cplx phase) {
    out[idx] = phase * profile.interpolate(profile.eta, r);
  });
  return out;
}

TangentFrame tangent_frame(const RadialProfile& profile, const SolitonParams& sigma, const GridPtr& grid) {
  check_mu(profile, sigma, "tangent_frame");
  check_guard(*grid, sigma, "tangent_frame");
  const int d = grid->dim();
  TangentFrame f;
  f.dim = d;
  f.z.assign(2 * d + 2, ComplexField(grid));
  const cplx I(0.0, 1.0);
  for_each_point(*grid, sigma, [&](std::size_t idx, const std::array<double, 2>& y, double r, cplx phase) {
    const auto s = profile.eval(r);
    const double dr_over_r = r > 0.0 ? s.deta / r : s.d2eta;
    for (int j = 0; j < d; ++j) {
      f.z[j][idx] = phase * (-dr_over_r * y[j]);
      f.z[d + j][idx] = phase * I * (y[j] * s.eta);
    }
    f.z[2 * d][idx] = phase * I * s.eta;
    f.z[2 * d + 1][idx] = phase * s.dmu;
  });
  return f;
}

TangentFrame tangent_frame_mu_derivative(const RadialProfile& profile, const SolitonParams& sigma, const GridPtr& grid) {
  check_mu(profile, sigma, "tangent_frame_mu_derivative");
  if (profile.dmu2.empty()) throw UsageError("tangent_frame_mu_derivative: profile lacks the second mu-derivative");
  const int d = grid->dim();
  TangentFrame f;
  f.dim = d;
  f.z.assign(2 * d + 2, ComplexField(grid));
  const cplx I(0.0, 1.0);
  for_each_point(*grid, sigma, [&](std::size_t idx, const std::array<double, 2>& y, double r, cplx phase) {
    const auto s = profile.eval(r);
    const double ddmu_over_r = r > 0.0 ? s.ddmu / r : profile.dmu.d2f[0];
    for (int j = 0; j < d; ++j) {
      f.z[j][idx] = phase * (-ddmu_over_r * y[j]);
      f.z[d + j][idx] = phase * I * (y[j] * s.dmu);
    }
    f.z[2 * d][idx] = phase * I * s.dmu;
    f.z[2 * d + 1][idx] = phase * s.dmu2;
  });
  return f;
}

ComplexField frame_transform(const ComplexField& psi, const SolitonParams& sigma) {
  const auto& g = psi.grid();
  ComplexField u = fourier_shift(psi, {-sigma.a[0], g.dim() == 2 ? -sigma.a[1] : 0.0});
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto x = g.point(idx);
    u[idx] *= std::polar(1.0, -(0.5 * (sigma.v[0] * x[0] + sigma.v[1] * x[1]) + sigma.gamma));
  }
  return u;
}

ComplexField frame_inverse(const ComplexField& u, const SolitonParams& sigma) {
  const auto& g = u.grid();
  ComplexField p = u;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto x = g.point(idx);
    p[idx] *= std::polar(1.0, 0.5 * (sigma.v[0] * x[0] + sigma.v[1] * x[1]) + sigma.gamma);
  }
  return fourier_shift(p, {sigma.a[0], g.dim() == 2 ? sigma.a[1] : 0.0});
}

}  // namespace nlsdyn
