#include "nlsdyn/model.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "nlsdyn/error.hpp"
#include "nlsdyn/potential.hpp"
#include "nlsdyn/spectral.hpp"

namespace nlsdyn {

struct NonlinearitySpec::KernelCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, double>, std::pair<RealField, std::vector<cplx>>> entries;
};

NonlinearitySpec NonlinearitySpec::power(double s, double lambda) {
  if (!(s > 0.0) || !std::isfinite(s)) throw UsageError(fmt::format("power exponent s must be positive, got {}", s));
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw UsageError(fmt::format("power coupling lambda must be non-negative, got {}", lambda));
  NonlinearitySpec n;
  n.kind_ = Kind::power;
  n.s_ = s;
  n.lambda_ = lambda;
  n.homogeneity_ = 2.0 * s + 1.0;
  n.name_ = fmt::format("power(s={:g},lambda={:g})", s, lambda);
  return n;
}

NonlinearitySpec NonlinearitySpec::local(ScalarFn h, ScalarFn dh, ScalarFn d2h, std::string name, double homogeneity) {
  if (!h || !dh || !d2h) throw UsageError("local nonlinearity needs h, h' and h''");
  if (h(0.0) != 0.0) throw UsageError(fmt::format("local nonlinearity '{}' must satisfy h(0) = 0", name));
  NonlinearitySpec n;
  n.kind_ = Kind::local;
  n.h_ = std::move(h);
  n.dh_ = std::move(dh);
  n.d2h_ = std::move(d2h);
  n.name_ = std::move(name);
  n.homogeneity_ = homogeneity;
  return n;
}

NonlinearitySpec NonlinearitySpec::hartree(KernelBuilder kernel, std::string name) {
  if (!kernel) throw UsageError("Hartree nonlinearity needs a kernel builder");
  NonlinearitySpec n;
  n.kind_ = Kind::hartree;
  n.kernel_ = std::move(kernel);
  n.name_ = std::move(name);
  n.homogeneity_ = 3.0;
  n.cache_ = std::make_shared<KernelCache>();
  return n;
}

NonlinearitySpec NonlinearitySpec::hartree_gaussian(double strength, double width) {
  if (!(strength > 0.0) || !(width > 0.0)) throw UsageError("Hartree Gaussian kernel needs positive strength and width");
  auto builder = [strength, width](const GridPtr& g) {
    RealField W(g);
    const double norm = std::pow(2.0 * M_PI * width * width, 0.5 * g->dim());
    for (std::size_t i = 0; i < g->size(); ++i) {
      const auto x = g->point(i);
      const double r2 = x[0] * x[0] + x[1] * x[1];
      W[i] = strength * std::exp(-r2 / (2.0 * width * width)) / norm;
    }
    return W;
  };
  auto n = hartree(builder, fmt::format("hartree_gaussian(strength={:g},width={:g})", strength, width));
  n.lambda_ = strength;
  return n;
}

NonlinearitySpec NonlinearitySpec::hartree_delta(double strength) {
  auto builder = [strength](const GridPtr& g) {
    RealField W(g);
    const int n = g->n();
    const std::size_t origin = g->dim() == 1 ? n / 2 : static_cast<std::size_t>(n / 2) * n + n / 2;
    W[origin] = strength / g->cell_volume();
    return W;
  };
  auto n = hartree(builder, fmt::format("hartree_delta(strength={:g})", strength));
  n.lambda_ = strength;
  return n;
}

std::string NonlinearitySpec::describe() const { return name_; }

double NonlinearitySpec::h(double p) const {
  switch (kind_) {
    case Kind::power: return lambda_ * std::pow(p, s_);
    case Kind::local: return h_(p);
    default: return 0.0;
  }
}

double NonlinearitySpec::dh(double p) const {
  switch (kind_) {
    case Kind::power: return s_ == 1.0 ? lambda_ : lambda_ * s_ * std::pow(p, s_ - 1.0);
    case Kind::local: return dh_(p);
    default: return 0.0;
  }
}

double NonlinearitySpec::d2h(double p) const {
  switch (kind_) {
    case Kind::power:
      return s_ == 1.0 ? 0.0 : lambda_ * s_ * (s_ - 1.0) * std::pow(p, s_ - 2.0);
    case Kind::local: return d2h_(p);
    default: return 0.0;
  }
}

double NonlinearitySpec::H(double p) const {
  switch (kind_) {
    case Kind::power: return lambda_ * std::pow(p, s_ + 1.0) / (s_ + 1.0);
    case Kind::local:
      return boost::math::quadrature::gauss<double, 20>::integrate([this](double t) { return h_(t); }, 0.0, p);
    default: return 0.0;
  }
}

double NonlinearitySpec::H_remainder2(double p0, double delta) const {
  if (delta == 0.0 || kind_ == Kind::hartree) return 0.0;
  if (kind_ == Kind::power && s_ == 1.0) return 0.5 * lambda_ * delta * delta;
  auto integrand = [&](double t) { return (delta - t) * dh(p0 + t); };
  return boost::math::quadrature::gauss<double, 20>::integrate(integrand, 0.0, delta);
}

double NonlinearitySpec::H_remainder3(double p0, double delta) const {
  if (delta == 0.0 || kind_ == Kind::hartree) return 0.0;
  if (kind_ == Kind::power && s_ == 1.0) return 0.0;
  auto integrand = [&](double t) { return 0.5 * (delta - t) * (delta - t) * d2h(p0 + t); };
  return boost::math::quadrature::gauss<double, 20>::integrate(integrand, 0.0, delta);
}

const std::vector<cplx>& NonlinearitySpec::kernel_hat(const GridPtr& grid) const {
  if (kind_ != Kind::hartree) throw UsageError("kernel requested for a local nonlinearity");
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto key = std::make_tuple(grid->dim(), grid->n(), grid->half_extent());
  auto it = cache_->entries.find(key);
  if (it == cache_->entries.end()) {
    RealField W = kernel_(grid);
    require_same_grid(W.grid(), *grid, "Hartree kernel builder");
    if (!W.all_finite()) throw UsageError(fmt::format("Hartree kernel '{}' has non-finite samples", name_));
    auto hat = kernel_transform(W);
    it = cache_->entries.emplace(key, std::make_pair(std::move(W), std::move(hat))).first;
  }
  return it->second.second;
}

RealField NonlinearitySpec::kernel(const GridPtr& grid) const {
  kernel_hat(grid);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return cache_->entries.at(std::make_tuple(grid->dim(), grid->n(), grid->half_extent())).first;
}

RealField nonlinear_multiplier(const NonlinearitySpec& spec, const ComplexField& psi) {
  RealField rho = modulus_squared(psi);
  if (spec.kind() == NonlinearitySpec::Kind::hartree) return periodic_convolution_hat(spec.kernel_hat(psi.grid_ptr()), rho);
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = spec.h(rho[i]);
  return rho;
}

ComplexField apply_nonlinearity(const NonlinearitySpec& spec, const ComplexField& psi) {
  auto out = multiply(nonlinear_multiplier(spec, psi), psi);
  if (!out.all_finite()) throw NumericalError(fmt::format("apply_nonlinearity: non-finite output for {}", spec.name()));
  return out;
}

RealField require_real_profile(const ComplexField& eta, const char* where) {
  double im = 0.0, re = 0.0;
  for (const auto& z : eta.values()) {
    im = std::max(im, std::abs(z.imag()));
    re = std::max(re, std::abs(z.real()));
  }
  if (im > 1e-12 * std::max(1.0, re))
    throw UsageError(fmt::format("{}: profile must be real (imaginary part {:.3e})", where, im));
  return real_part(eta);
}

ComplexField linearized_action(const NonlinearitySpec& spec, const RealField& eta, const ComplexField& w) {
  require_same_grid(eta.grid(), w.grid(), "linearized_action");
  ComplexField out(w.grid_ptr());
  if (spec.is_local()) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double p = eta[i] * eta[i];
      const double f2 = spec.h(p);
      const double f1 = f2 + 2.0 * spec.dh(p) * p;
      out[i] = cplx(f1 * w[i].real(), f2 * w[i].imag());
    }
    return out;
  }
  const auto& What = spec.kernel_hat(w.grid_ptr());
  RealField rho0(eta.grid_ptr()), eta_w1(eta.grid_ptr());
  for (std::size_t i = 0; i < w.size(); ++i) {
    rho0[i] = eta[i] * eta[i];
    eta_w1[i] = eta[i] * w[i].real();
  }
  const RealField U = periodic_convolution_hat(What, rho0);
  const RealField C = periodic_convolution_hat(What, eta_w1);
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = U[i] * w[i] + cplx(2.0 * eta[i] * C[i], 0.0);
  return out;
}

Remainders nonlinear_remainders(const NonlinearitySpec& spec, const ComplexField& eta_c, const ComplexField& w) {
  require_same_grid(eta_c.grid(), w.grid(), "nonlinear_remainders");
  const RealField eta = require_real_profile(eta_c, "nonlinear_remainders");
  const auto& grid = w.grid_ptr();
  Remainders r{linearized_action(spec, eta, w), ComplexField(grid), 0.0, 0.0};
  const ComplexField full = apply_nonlinearity(spec, eta_c + w);
  const ComplexField base = apply_nonlinearity(spec, eta_c);
  for (std::size_t i = 0; i < w.size(); ++i) r.N2[i] = full[i] - base[i] - r.fprime_w[i];

  RealField rho0(grid), delta1(grid), w2(grid);
  for (std::size_t i = 0; i < w.size(); ++i) {
    rho0[i] = eta[i] * eta[i];
    delta1[i] = 2.0 * eta[i] * w[i].real();
    w2[i] = std::norm(w[i]);
  }
  const double hd = grid->cell_volume();
  if (spec.is_local()) {
    double s2 = 0.0, s3 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double delta = delta1[i] + w2[i];
      s2 += spec.H_remainder2(rho0[i], delta) + spec.h(rho0[i]) * w2[i];
      s3 += spec.H_remainder3(rho0[i], delta) + 0.5 * spec.dh(rho0[i]) * (2.0 * delta1[i] * w2[i] + w2[i] * w2[i]);
    }
    r.R2 = 0.5 * s2 * hd;
    r.R3 = 0.5 * s3 * hd;
    return r;
  }
  const auto& What = spec.kernel_hat(grid);
  RealField delta = delta1 + w2;
  const RealField Wd = periodic_convolution_hat(What, delta);
  const RealField Wr = periodic_convolution_hat(What, rho0);
  const RealField Wd1 = periodic_convolution_hat(What, delta1);
  const RealField Ww2 = periodic_convolution_hat(What, w2);
  double a = 0.0, b = 0.0, c = 0.0, e = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    a += Wd[i] * delta[i];
    b += Wr[i] * w2[i];
    c += Wd1[i] * w2[i];
    e += Ww2[i] * w2[i];
  }
  r.R2 = (0.25 * a + 0.5 * b) * hd;
  r.R3 = 0.25 * (2.0 * c + e) * hd;
  return r;
}

double nonlinear_energy(const NonlinearitySpec& spec, const ComplexField& psi) {
  const auto& g = psi.grid();
  if (spec.is_local()) {
    double s = 0.0;
    for (const auto& z : psi.values()) s += spec.H(std::norm(z));
    return 0.5 * s * g.cell_volume();
  }
  const RealField rho = modulus_squared(psi);
  const RealField U = periodic_convolution_hat(spec.kernel_hat(psi.grid_ptr()), rho);
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += U[i] * rho[i];
  return 0.25 * s * g.cell_volume();
}

double mass(const ComplexField& psi) { return 0.5 * real_inner(psi, psi); }

std::array<double, 2> momentum(const ComplexField& psi) {
  std::array<double, 2> p{0.0, 0.0};
  for (int j = 0; j < psi.grid().dim(); ++j) {
    // <ψ, -i ∂ψ> = Re ∫ ψ conj(-i ∂ψ)
    auto d = gradient_component(psi, j);
    d *= cplx(0.0, -1.0);
    p[j] = real_inner(psi, d);
  }
  return p;
}

Functionals functionals(const NonlinearitySpec& spec, const ComplexField& psi, const RealField& V, double mu) {
  require_same_grid(psi.grid(), V.grid(), "functionals");
  Functionals f{};
  const double l2sq = real_inner(psi, psi);
  const double grad2 = gradient_norm_squared(psi);
  double pot = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) pot += V[i] * std::norm(psi[i]);
  pot *= psi.grid().cell_volume();
  f.mass_N = 0.5 * l2sq;
  f.F_val = nonlinear_energy(spec, psi);
  f.energy_HV = 0.5 * (grad2 + pot) - f.F_val;
  f.energy_Emu = 0.5 * (grad2 + mu * l2sq) - f.F_val;
  f.momentum = momentum(psi);
  return f;
}

Functionals functionals(const NonlinearitySpec& spec, const ComplexField& psi, const PotentialSpec& V, double mu) {
  return functionals(spec, psi, V.sample(psi.grid_ptr()), mu);
}

bool ConditionReport::all_pass() const {
  for (const auto& it : items)
    if (!it.pass) return false;
  return true;
}

const ConditionItem* ConditionReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

ConditionReport verify_conditions(const NonlinearitySpec& spec, int d) {
  ConditionReport rep;
  if (d != 1 && d != 2) throw UsageError(fmt::format("verify_conditions: unsupported dimension {}", d));
  using K = NonlinearitySpec::Kind;

  rep.items.push_back({"functional", true, fmt::format("F'(psi) = f(psi) by construction for {}", spec.name())});

  if (spec.kind() == K::hartree) {
    rep.items.push_back({"existence", d == 1,
                         d == 1 ? "Hartree ground state computed on a periodic 1D grid"
                                : "Hartree ground states are supported only for d = 1"});
    rep.items.push_back({"well_posedness", true, "bounded even kernel"});
    rep.items.push_back({"stability", true, "decided by the sign of m'(mu) from the mass curve"});
    return rep;
  }

  // h'(r) + h''(r) r > 0 on a log grid.
  bool mic = true;
  double worst = INFINITY, worst_r = 0.0;
  for (int i = 0; i <= 90; ++i) {
    const double r = std::pow(10.0, -6.0 + 9.0 * i / 90.0);
    const double val = spec.dh(r) + spec.d2h(r) * r;
    if (!(val > 0.0)) mic = false;
    if (val < worst) {
      worst = val;
      worst_r = r;
    }
  }
  rep.items.push_back({"monotonicity", mic,
                       fmt::format("min of h'(r)+h''(r)r on [1e-6,1e3] is {:.6g} at r={:.3g}", worst, worst_r)});

  if (spec.kind() == K::power) {
    const double s = spec.exponent();
    const bool focusing = spec.coupling() > 0.0;
    rep.items.push_back({"existence", focusing,
                         focusing ? fmt::format("power law s={:g} is subcritical for existence in d={}", s, d)
                                  : std::string("lambda = 0 is linear and has no ground state")});
    rep.items.push_back({"well_posedness", true, fmt::format("d={} admits any s > 0", d)});
    const double crit = 2.0 / d;
    rep.items.push_back({"stability", s < crit, fmt::format("s={:g} vs 2/d={:g}", s, crit)});
  } else {
    rep.items.push_back({"existence", mic, "relies on the monotonicity sample"});
    rep.items.push_back({"well_posedness", true, "assumed for d <= 2"});
    rep.items.push_back({"stability", true, "decided by the sign of m'(mu) from the mass curve"});
  }
  return rep;
}

}  // namespace nlsdyn
