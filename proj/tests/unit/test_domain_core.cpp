#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "../oracle_values.hpp"
#include "nlsdyn/error.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/profile.hpp"
#include "nlsdyn/spectral.hpp"

using namespace nlsdyn;

namespace {

GridPtr line() { return make_grid(1, 2048, 60.0); }

ComplexField random_bandlimited(const GridPtr& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  ComplexField u(g);
  const cplx c0(n(rng), n(rng)), c1(n(rng), n(rng));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto x = g->point(i);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    u[i] = (c0 + c1 * x[0]) * std::exp(-0.3 * r2);
  }
  return u;
}

ComplexField cubic_eta(const GridPtr& g) {
  static const RadialProfile p = solve_profile(NonlinearitySpec::power(1.0, 1.0), 1.0, 1);
  return synthesize(p, SolitonParams{}, g);
}

}  // namespace

TEST(Grid, Invariants) {
  EXPECT_THROW(make_grid(1, 8, 10.0), Error);
  EXPECT_THROW(make_grid(3, 64, 10.0), Error);
  EXPECT_THROW(make_grid(1, 100, 10.0), Error);
  const auto g = make_grid(2, 64, 10.0);
  EXPECT_EQ(g->size(), 64u * 64u);
  EXPECT_DOUBLE_EQ(g->spacing(), 20.0 / 64);
  const auto k = g->wavenumbers();
  double sum = 0.0;
  for (double x : k) sum += x;
  // symmetric about zero except the single Nyquist entry
  EXPECT_NEAR(sum, -g->k_max(), 1e-9);
}

TEST(InnerProducts, Antisymmetry) {
  const auto g = line();
  const auto u = random_bandlimited(g, 1), v = random_bandlimited(g, 2);
  EXPECT_NEAR(symplectic(u, u), 0.0, 1e-14);
  EXPECT_NEAR(real_inner(u, cplx(0, 1) * u), 0.0, 1e-14);
  EXPECT_NEAR(symplectic(u, v), -symplectic(v, u), 1e-13);
  EXPECT_NEAR(real_inner(u, v), real_inner(v, u), 1e-13);
  // ω(u,v) = <u, J⁻¹v> with J = 1/i
  EXPECT_NEAR(symplectic(u, v), real_inner(u, cplx(0, 1) * v), 1e-13);
}

TEST(InnerProducts, ProfileAgainstGauge) {
  const auto g = line();
  const auto eta = cubic_eta(g);
  const auto p = inner_products(eta, cplx(0, 1) * eta);
  EXPECT_NEAR(p.symplectic, -oracle::kIntEta2, 1e-9);
  EXPECT_NEAR(p.real_inner, 0.0, 1e-14);
}

TEST(InnerProducts, GridMismatch) {
  const auto u = random_bandlimited(line(), 1);
  const auto v = random_bandlimited(make_grid(1, 1024, 60.0), 1);
  EXPECT_THROW(inner_products(u, v), Error);
}

TEST(SpectralDerivative, PlaneWave) {
  const auto g = line();
  const double k0 = 5.0 * std::numbers::pi / g->half_extent();
  ComplexField u(g), c(g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = std::polar(1.0, k0 * g->point(i)[0]);
    c[i] = 3.0;
  }
  const auto d1 = spectral_derivative(u, 0, 1), d2 = spectral_derivative(u, 0, 2), d0 = spectral_derivative(c, 0, 1);
  double e1 = 0.0, e2 = 0.0, e0 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    e1 = std::max(e1, std::abs(d1[i] - cplx(0, k0) * u[i]));
    e2 = std::max(e2, std::abs(d2[i] + k0 * k0 * u[i]));
    e0 = std::max(e0, std::abs(d0[i]));
  }
  EXPECT_LT(e1, 1e-12);
  EXPECT_LT(e2, 1e-14 * g->k_max() * g->k_max());
  EXPECT_LT(e0, 1e-12);
}

TEST(SpectralDerivative, BoostProductRule) {
  const auto g = line();
  const auto u = random_bandlimited(g, 3);
  const double v = 4.0 * std::numbers::pi / g->half_extent();
  ComplexField bu(g);
  for (std::size_t i = 0; i < u.size(); ++i) bu[i] = std::polar(1.0, 0.5 * v * g->point(i)[0]) * u[i];
  const auto lhs = spectral_derivative(bu, 0, 1);
  const auto du = spectral_derivative(u, 0, 1);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    err = std::max(err, std::abs(lhs[i] - std::polar(1.0, 0.5 * v * g->point(i)[0]) * (du[i] + cplx(0, 0.5 * v) * u[i])));
  EXPECT_LT(err, 1e-10);
}

TEST(Norms, ZeroAndProfile) {
  const auto g = line();
  const auto z = norms(ComplexField(g));
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.h1, 0.0);
  const auto eta = cubic_eta(g);
  const auto n = norms(eta);
  EXPECT_NEAR(n.l2 * n.l2, oracle::kIntEta2, 1e-9);
  EXPECT_NEAR(gradient_norm_squared(eta), oracle::kIntDEta2, 1e-9);
  EXPECT_NEAR(n.h1 * n.h1, oracle::kIntEta2 + oracle::kIntDEta2, 1e-9);
  EXPECT_GE(n.h1, n.l2);
}

TEST(Norms, Parseval) {
  for (int d : {1, 2}) {
    const auto g = make_grid(d, d == 1 ? 512 : 64, 8.0);
    const auto u = random_bandlimited(g, 4);
    const auto spec = fft_forward(u);
    double s = 0.0;
    for (const auto& c : spec) s += std::norm(c);
    s *= g->cell_volume() / static_cast<double>(g->size());
    const double l2 = l2_norm(u);
    EXPECT_NEAR(s / (l2 * l2), 1.0, 1e-12);
  }
}

TEST(Convolution, DeltaAndConstantKernels) {
  const auto g = make_grid(1, 512, 20.0);
  RealField f(g), delta(g), one(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = g->point(i)[0];
    f[i] = std::exp(-x * x) * (1.0 + 0.3 * x);
    one[i] = 1.0;
  }
  delta[g->n() / 2] = 1.0 / g->spacing();
  const auto a = periodic_convolution(delta, f);
  const auto b = periodic_convolution(one, f);
  const double total = integrate(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(a[i], f[i], 1e-10);
    EXPECT_NEAR(b[i], total, 1e-10);
  }
}

TEST(Convolution, GaussiansAddVariances) {
  const auto g = make_grid(1, 1024, 40.0);
  const double s1 = 0.7, s2 = 1.3, s = std::hypot(s1, s2);
  auto gauss = [](double x, double sig) {
    return std::exp(-x * x / (2 * sig * sig)) / std::sqrt(2 * std::numbers::pi * sig * sig);
  };
  RealField a(g), b(g);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = gauss(g->point(i)[0], s1);
    b[i] = gauss(g->point(i)[0], s2);
  }
  const auto c = periodic_convolution(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(c[i], gauss(g->point(i)[0], s), 1e-8);
}
