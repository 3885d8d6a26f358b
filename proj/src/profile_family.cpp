#include "nlsdyn/profile_family.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nlsdyn/error.hpp"

namespace nlsdyn {
namespace {

constexpr int kStencil = 6;

void scale_series(const RadialSeries& src, double t, double weight, RadialSeries& dst) {
  const double a0 = std::pow(t, weight);
  const double a1 = a0 * std::sqrt(t);
  const double a2 = a0 * t;
  dst.f.resize(src.f.size());
  dst.df.resize(src.f.size());
  dst.d2f.resize(src.f.size());
  for (std::size_t i = 0; i < src.f.size(); ++i) {
    dst.f[i] = a0 * src.f[i];
    dst.df[i] = a1 * src.df[i];
    dst.d2f[i] = a2 * src.d2f[i];
  }
}

}  // namespace

ProfileFamily::ProfileFamily(NonlinearitySpec spec, int d, double mu_lo, double mu_hi, ProfileOptions opt,
                             double spacing)
    : spec_(std::move(spec)), d_(d), mu_lo_(mu_lo), mu_hi_(mu_hi), opt_(opt), spacing_(spacing) {
  if (!(mu_lo > 0.0) || !(mu_hi >= mu_lo))
    throw UsageError(fmt::format("profile family: invalid interval [{}, {}]", mu_lo, mu_hi));
  if (!(spacing > 0.0)) throw UsageError("profile family: lattice spacing must be positive");
  lattice_origin_ = mu_lo - 3.0 * spacing;
  if (spec_.kind() != NonlinearitySpec::Kind::power && !(lattice_origin_ > 0.0))
    throw UsageError("profile family: interval too close to mu = 0 for the interpolation stencil");
}

std::shared_ptr<const RadialProfile> ProfileFamily::lattice(int j) const {
  auto it = lattice_.find(j);
  if (it != lattice_.end()) return it->second;
  auto p = std::make_shared<const RadialProfile>(solve_profile(spec_, lattice_origin_ + j * spacing_, d_, opt_));
  lattice_.emplace(j, p);
  return p;
}

std::shared_ptr<const RadialProfile> ProfileFamily::at(double mu) const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw NumericalError(fmt::format("profile family: invalid mu {}", mu));
  if (!contains(mu))
    throw NumericalError(fmt::format("left parameter domain: mu={} outside [{}, {}]", mu, mu_lo_, mu_hi_));
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = recent_.find(mu);
  if (it != recent_.end()) return it->second;
  auto p = build(mu);
  if (recent_.size() >= 16) recent_.clear();
  recent_.emplace(mu, p);
  return p;
}

std::shared_ptr<const RadialProfile> ProfileFamily::build(double mu) const {
  return spec_.kind() == NonlinearitySpec::Kind::power ? scaled(mu) : interpolated(mu);
}

std::shared_ptr<const RadialProfile> ProfileFamily::scaled(double mu) const {
  if (!base_) {
    const double mu_b = 0.5 * (mu_lo_ + mu_hi_);
    auto b = std::make_shared<RadialProfile>(solve_profile(spec_, mu_b, d_, opt_));
    // ∂_μ²η = -(1/2μ²)(1/s + D)η + (1/4μ²)(1/s + D)²η with D = r∂_r.
    const double s = spec_.exponent();
    std::vector<double> q(b->size());
    for (std::size_t i = 0; i < b->size(); ++i) {
      const double r = b->r[i];
      const double e = b->eta.f[i], e1 = b->eta.df[i], e2 = b->eta.d2f[i];
      const double one = e / s + r * e1;
      const double two = e / (s * s) + (2.0 / s + 1.0) * r * e1 + r * r * e2;
      q[i] = (-0.5 * one + 0.25 * two) / (mu_b * mu_b);
    }
    b->dmu2.f = std::move(q);
    radial_fd_derivatives(b->dmu2.f, b->h, 1, b->dmu2.df, b->dmu2.d2f);
    base_ = std::move(b);
  }
  const auto& b = *base_;
  const double t = mu / b.mu;
  const double w = 0.5 / spec_.exponent();
  auto p = std::make_shared<RadialProfile>();
  p->mu = mu;
  p->dim = d_;
  p->spec_name = b.spec_name;
  p->h = b.h / std::sqrt(t);
  p->r_max = b.r_max / std::sqrt(t);
  p->residual = b.residual * std::pow(t, w + 1.0);
  p->mu_residual = b.mu_residual * std::pow(t, w);
  p->r.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) p->r[i] = i * p->h;
  scale_series(b.eta, t, w, p->eta);
  scale_series(b.dmu, t, w - 1.0, p->dmu);
  scale_series(b.dmu2, t, w - 2.0, p->dmu2);
  const double dim_factor = std::pow(t, -0.5 * d_);
  p->mass = b.mass * std::pow(t, 2.0 * w) * dim_factor;
  p->dmass = b.dmass * std::pow(t, 2.0 * w - 1.0) * dim_factor;
  return p;
}

std::shared_ptr<const RadialProfile> ProfileFamily::interpolated(double mu) const {
  const double x = (mu - lattice_origin_) / spacing_;
  const int j0 = static_cast<int>(std::floor(x)) - kStencil / 2 + 1;
  std::shared_ptr<const RadialProfile> nodes[kStencil];
  double mus[kStencil];
  for (int k = 0; k < kStencil; ++k) {
    nodes[k] = lattice(j0 + k);
    mus[k] = nodes[k]->mu;
  }
  // Lagrange weights and their μ-derivatives.
  double L[kStencil], dL[kStencil];
  for (int k = 0; k < kStencil; ++k) {
    double num = 1.0, den = 1.0;
    for (int m = 0; m < kStencil; ++m) {
      if (m == k) continue;
      num *= mu - mus[m];
      den *= mus[k] - mus[m];
    }
    L[k] = num / den;
    double dsum = 0.0;
    for (int m = 0; m < kStencil; ++m) {
      if (m == k) continue;
      double prod = 1.0;
      for (int q = 0; q < kStencil; ++q)
        if (q != k && q != m) prod *= mu - mus[q];
      dsum += prod;
    }
    dL[k] = dsum / den;
  }
  const std::size_t n = nodes[0]->size();
  auto p = std::make_shared<RadialProfile>();
  p->mu = mu;
  p->dim = d_;
  p->spec_name = nodes[0]->spec_name;
  p->r_max = opt_.r_max_scale / std::sqrt(mu);
  p->h = p->r_max / static_cast<double>(n);
  p->r.resize(n);
  for (auto* s : {&p->eta, &p->dmu, &p->dmu2}) {
    s->f.assign(n, 0.0);
    s->df.assign(n, 0.0);
    s->d2f.assign(n, 0.0);
  }
  for (int k = 0; k < kStencil; ++k) {
    p->residual = std::max(p->residual, nodes[k]->residual);
    p->mu_residual = std::max(p->mu_residual, nodes[k]->mu_residual);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double r = i * p->h;
    p->r[i] = r;
    for (int k = 0; k < kStencil; ++k) {
      const auto& q = *nodes[k];
      const auto e = q.eval(r);
      const double m0 = q.interpolate(q.dmu, r);
      const double m1 = q.interpolate_derivative(q.dmu, r);
      p->eta.f[i] += L[k] * e.eta;
      p->eta.df[i] += L[k] * e.deta;
      p->eta.d2f[i] += L[k] * e.d2eta;
      p->dmu.f[i] += L[k] * m0;
      p->dmu.df[i] += L[k] * m1;
      p->dmu2.f[i] += dL[k] * m0;
      p->dmu2.df[i] += dL[k] * m1;
    }
  }
  std::vector<double> scratch;
  radial_fd_derivatives(p->dmu.f, p->h, 1, scratch, p->dmu.d2f);
  radial_fd_derivatives(p->dmu2.f, p->h, 1, scratch, p->dmu2.d2f);
  std::vector<double> sq(n), cr(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq[i] = p->eta.f[i] * p->eta.f[i];
    cr[i] = p->eta.f[i] * p->dmu.f[i];
  }
  p->mass = 0.5 * radial_integral(*p, sq);
  p->dmass = radial_integral(*p, cr);
  return p;
}

}  // namespace nlsdyn
