#include "nlsdyn/potential.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nlsdyn/error.hpp"

namespace nlsdyn {
namespace {

void check_dim(int d) {
  if (d != 1 && d != 2) throw UsageError(fmt::format("potential dimension must be 1 or 2, got {}", d));
}

void check_mu0(double mu0) {
  if (!(mu0 > 0.0) || !std::isfinite(mu0)) throw UsageError(fmt::format("mu0 must be positive, got {}", mu0));
}

}  // namespace

PotentialSpec PotentialSpec::zero(int d) {
  check_dim(d);
  PotentialSpec p;
  p.d_ = d;
  p.finalize(std::nullopt);
  return p;
}

PotentialSpec PotentialSpec::constant(int d, double value) {
  check_dim(d);
  if (!std::isfinite(value)) throw UsageError("constant potential must be finite");
  PotentialSpec p;
  p.family_ = Family::constant;
  p.d_ = d;
  p.amplitude_ = value;
  p.finalize(std::nullopt);
  return p;
}

PotentialSpec PotentialSpec::cosine(int d, double amplitude, std::array<double, 2> rate, double mu0,
                                    std::optional<double> declared_eps) {
  check_dim(d);
  check_mu0(mu0);
  if (!std::isfinite(amplitude) || !std::isfinite(rate[0]) || !std::isfinite(rate[1]))
    throw UsageError("cosine potential parameters must be finite");
  PotentialSpec p;
  p.family_ = Family::cosine;
  p.d_ = d;
  p.amplitude_ = amplitude;
  p.rate_ = {rate[0], d == 2 ? rate[1] : 0.0};
  p.mu0_ = mu0;
  p.finalize(declared_eps);
  return p;
}

PotentialSpec PotentialSpec::cosine_from_eps(int d, double amplitude, double eps, double mu0) {
  check_dim(d);
  if (amplitude == 0.0) throw UsageError("cosine potential amplitude must be nonzero");
  if (!(eps >= 0.0)) throw UsageError(fmt::format("eps_V must be non-negative, got {}", eps));
  // sup|∇V| = |A| |κ| with equal κ per axis.
  const double kappa = eps * std::sqrt(mu0) / (std::abs(amplitude) * std::sqrt(static_cast<double>(d)));
  return cosine(d, amplitude, {kappa, kappa}, mu0, eps);
}

PotentialSpec PotentialSpec::gaussian_well(int d, double depth, double rate, double mu0,
                                           std::optional<double> declared_eps) {
  check_dim(d);
  check_mu0(mu0);
  if (!std::isfinite(depth) || !(rate >= 0.0)) throw UsageError("gaussian_well needs finite depth and rate >= 0");
  PotentialSpec p;
  p.family_ = Family::gaussian_well;
  p.d_ = d;
  p.amplitude_ = depth;
  p.rate_ = {rate, rate};
  p.mu0_ = mu0;
  p.finalize(declared_eps);
  return p;
}

PotentialSpec PotentialSpec::gaussian_well_from_eps(int d, double depth, double eps, double mu0) {
  if (depth == 0.0) throw UsageError("gaussian_well depth must be nonzero");
  const double rate = eps * std::sqrt(mu0) * std::exp(0.5) / std::abs(depth);
  return gaussian_well(d, depth, rate, mu0, eps);
}

void PotentialSpec::finalize(std::optional<double> declared) {
  eps_ = sup_gradient() / std::sqrt(mu0_);
  if (declared && std::abs(*declared - eps_) > 1e-12 * std::max(1.0, std::abs(eps_)))
    throw UsageError(fmt::format("declared eps_V {} inconsistent with family parameters (computed {})", *declared, eps_));
}

std::string PotentialSpec::describe() const {
  switch (family_) {
    case Family::zero: return "zero";
    case Family::constant: return fmt::format("constant(value={:g})", amplitude_);
    case Family::cosine:
      return d_ == 1 ? fmt::format("cosine(A={:g},kappa={:.6g})", amplitude_, rate_[0])
                     : fmt::format("cosine(A={:g},kappa=({:.6g},{:.6g}))", amplitude_, rate_[0], rate_[1]);
    case Family::gaussian_well: return fmt::format("gaussian_well(A={:g},kappa={:.6g})", amplitude_, rate_[0]);
  }
  return "unknown";
}

double PotentialSpec::value(std::array<double, 2> x) const {
  switch (family_) {
    case Family::zero: return 0.0;
    case Family::constant: return amplitude_;
    case Family::cosine: {
      double v = std::cos(rate_[0] * x[0]);
      if (d_ == 2) v += std::cos(rate_[1] * x[1]);
      return amplitude_ * v;
    }
    case Family::gaussian_well: {
      const double r2 = x[0] * x[0] + (d_ == 2 ? x[1] * x[1] : 0.0);
      return -amplitude_ * std::exp(-0.5 * rate_[0] * rate_[0] * r2);
    }
  }
  return 0.0;
}

std::array<double, 2> PotentialSpec::gradient(std::array<double, 2> x) const {
  switch (family_) {
    case Family::zero:
    case Family::constant: return {0.0, 0.0};
    case Family::cosine:
      return {-amplitude_ * rate_[0] * std::sin(rate_[0] * x[0]),
              d_ == 2 ? -amplitude_ * rate_[1] * std::sin(rate_[1] * x[1]) : 0.0};
    case Family::gaussian_well: {
      const double k2 = rate_[0] * rate_[0];
      const double r2 = x[0] * x[0] + (d_ == 2 ? x[1] * x[1] : 0.0);
      const double e = amplitude_ * k2 * std::exp(-0.5 * k2 * r2);
      return {e * x[0], d_ == 2 ? e * x[1] : 0.0};
    }
  }
  return {0.0, 0.0};
}

std::array<double, 4> PotentialSpec::hessian(std::array<double, 2> x) const {
  switch (family_) {
    case Family::zero:
    case Family::constant: return {0.0, 0.0, 0.0, 0.0};
    case Family::cosine:
      return {-amplitude_ * rate_[0] * rate_[0] * std::cos(rate_[0] * x[0]), 0.0, 0.0,
              d_ == 2 ? -amplitude_ * rate_[1] * rate_[1] * std::cos(rate_[1] * x[1]) : 0.0};
    case Family::gaussian_well: {
      const double k2 = rate_[0] * rate_[0];
      const double y = d_ == 2 ? x[1] : 0.0;
      const double e = amplitude_ * k2 * std::exp(-0.5 * k2 * (x[0] * x[0] + y * y));
      return {e * (1.0 - k2 * x[0] * x[0]), -e * k2 * x[0] * y, -e * k2 * x[0] * y,
              d_ == 2 ? e * (1.0 - k2 * y * y) : 0.0};
    }
  }
  return {0.0, 0.0, 0.0, 0.0};
}

double PotentialSpec::sup_gradient() const {
  switch (family_) {
    case Family::zero:
    case Family::constant: return 0.0;
    case Family::cosine: return std::abs(amplitude_) * std::hypot(rate_[0], rate_[1]);
    case Family::gaussian_well: return std::abs(amplitude_) * rate_[0] * std::exp(-0.5);
  }
  return 0.0;
}

RealField PotentialSpec::sample(const GridPtr& grid) const {
  if (grid->dim() != d_) throw UsageError("potential dimension differs from grid dimension");
  RealField V(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) V[i] = value(grid->point(i));
  return V;
}

RealField PotentialSpec::sample_gradient(const GridPtr& grid, int axis) const {
  if (grid->dim() != d_) throw UsageError("potential dimension differs from grid dimension");
  RealField G(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) G[i] = gradient(grid->point(i))[axis];
  return G;
}

RealField PotentialSpec::sample_remainder(const GridPtr& grid, std::array<double, 2> a) const {
  if (grid->dim() != d_) throw UsageError("potential dimension differs from grid dimension");
  RealField R(grid);
  const double Va = value(a);
  const auto Ga = gradient(a);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto x = grid->point(i);
    R[i] = value({x[0] + a[0], x[1] + a[1]}) - Va - Ga[0] * x[0] - Ga[1] * x[1];
  }
  return R;
}

}  // namespace nlsdyn
