#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nlsdyn/error.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/model.hpp"
#include "nlsdyn/potential.hpp"
#include "nlsdyn/profile.hpp"
#include "nlsdyn/spectral.hpp"

using namespace nlsdyn;

namespace {

const NonlinearitySpec cubic = NonlinearitySpec::power(1.0, 1.0);

GridPtr line() { return make_grid(1, 1024, 40.0); }

ComplexField cubic_eta(const GridPtr& g) {
  static const RadialProfile p = solve_profile(cubic, 1.0, 1);
  return synthesize(p, SolitonParams{}, g);
}

ComplexField bump(const GridPtr& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  const cplx c0(n(rng), n(rng)), c1(n(rng), n(rng));
  ComplexField u(g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = g->point(i)[0];
    u[i] = (c0 + c1 * x) * std::exp(-0.5 * (x - 0.4) * (x - 0.4));
  }
  return u;
}

double max_abs(const ComplexField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

}  // namespace

TEST(Nonlinearity, Invariants) {
  EXPECT_THROW(NonlinearitySpec::power(0.0, 1.0), Error);
  EXPECT_THROW(NonlinearitySpec::power(1.0, -1.0), Error);
  EXPECT_NO_THROW(NonlinearitySpec::power(1.0, 0.0));
}

TEST(Nonlinearity, ZeroAndConstant) {
  const auto g = line();
  EXPECT_EQ(max_abs(apply_nonlinearity(cubic, ComplexField(g))), 0.0);
  ComplexField two(g);
  for (std::size_t i = 0; i < two.size(); ++i) two[i] = 2.0;
  const auto f = apply_nonlinearity(cubic, two);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(f[i] - cplx(8.0)), 0.0, 1e-14);
}

TEST(Nonlinearity, GaugeCovariance) {
  const auto g = line();
  const auto u = bump(g, 1);
  const cplx ph = std::polar(1.0, 0.83);
  for (const auto& spec : {cubic, NonlinearitySpec::power(1.5, 2.0), NonlinearitySpec::hartree_gaussian(1.0, 1.0)}) {
    const auto a = apply_nonlinearity(spec, ph * u);
    const auto b = ph * apply_nonlinearity(spec, u);
    EXPECT_LT(max_abs(a - b), 1e-13 * (1.0 + max_abs(b)));
  }
}

TEST(Nonlinearity, DeltaHartreeMatchesCubic) {
  const auto g = line();
  const auto u = bump(g, 2);
  const auto a = apply_nonlinearity(NonlinearitySpec::hartree_delta(1.0), u);
  const auto b = apply_nonlinearity(cubic, u);
  EXPECT_LT(max_abs(a - b), 1e-8);
}

TEST(Remainders, ZeroIncrement) {
  const auto g = line();
  const auto eta = cubic_eta(g);
  const auto r = nonlinear_remainders(cubic, eta, ComplexField(g));
  EXPECT_EQ(max_abs(r.N2), 0.0);
  EXPECT_NEAR(r.R2, 0.0, 1e-15);
  EXPECT_NEAR(r.R3, 0.0, 1e-15);
}

TEST(Remainders, CubicExpansion) {
  const auto g = line();
  const auto eta = cubic_eta(g);
  const double eps = 0.01;
  const auto r = nonlinear_remainders(cubic, eta, cplx(eps) * eta);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double e = eta[i].real(), w = eps * e;
    EXPECT_NEAR(r.N2[i].real(), 3 * e * w * w + w * w * w, 1e-14);
  }
}

TEST(Remainders, CubicOrderScaling) {
  const auto g = line();
  const auto eta = cubic_eta(g);
  const auto w = cplx(0.05) * bump(g, 3);
  const double r1 = nonlinear_remainders(cubic, eta, w).R3;
  const double r2 = nonlinear_remainders(cubic, eta, cplx(0.5) * w).R3;
  EXPECT_NEAR(r1 / r2, 8.0, 0.8);
}

TEST(Remainders, ComplexProfileRejected) {
  const auto g = line();
  const auto eta = cplx(0, 1) * cubic_eta(g);
  EXPECT_THROW(nonlinear_remainders(cubic, eta, ComplexField(g)), Error);
}

TEST(Functionals, Basics) {
  const auto g = line();
  const auto V = PotentialSpec::zero(1);
  const auto z = functionals(cubic, ComplexField(g), V, 1.0);
  EXPECT_EQ(z.mass_N, 0.0);
  EXPECT_EQ(z.energy_HV, 0.0);
  EXPECT_EQ(z.F_val, 0.0);
  const auto eta = cubic_eta(g);
  const auto f = functionals(cubic, eta, V, 1.0);
  EXPECT_NEAR(f.mass_N, 2.0, 1e-9);
  EXPECT_NEAR(f.momentum[0], 0.0, 1e-14);
  // E_μ is H_V with V replaced by the constant μ.
  const auto c = functionals(cubic, eta, PotentialSpec::constant(1, 1.0), 1.0);
  EXPECT_NEAR(c.energy_HV, f.energy_Emu, 1e-12);
}

TEST(Functionals, GaugeInvariance) {
  const auto g = line();
  const auto u = bump(g, 4);
  const auto V = PotentialSpec::cosine_from_eps(1, -0.5, 0.05, 1.0);
  const auto a = functionals(cubic, u, V, 1.0);
  const auto b = functionals(cubic, std::polar(1.0, 1.7) * u, V, 1.0);
  EXPECT_NEAR(a.F_val, b.F_val, 1e-12 * std::abs(a.F_val));
  EXPECT_NEAR(a.mass_N, b.mass_N, 1e-12 * a.mass_N);
  EXPECT_NEAR(a.energy_HV, b.energy_HV, 1e-12 * std::abs(a.energy_HV));
}

TEST(Functionals, GradientAndHessianChecks) {
  const auto g = line();
  const auto eta = cubic_eta(g);
  const auto psi = eta + cplx(0.2) * bump(g, 5);
  const auto phi = bump(g, 6);
  for (const auto& spec : {cubic, NonlinearitySpec::power(1.5, 1.0), NonlinearitySpec::hartree_gaussian(1.0, 0.8)}) {
    const double e = 1e-4;
    const double fd = (nonlinear_energy(spec, psi + cplx(e) * phi) - nonlinear_energy(spec, psi - cplx(e) * phi)) / (2 * e);
    const double an = real_inner(apply_nonlinearity(spec, psi), phi);
    EXPECT_NEAR(fd, an, 1e-6 * (1.0 + std::abs(an)));
    const RealField re = real_part(eta);
    const double F0 = nonlinear_energy(spec, eta);
    const double fd2 =
        (nonlinear_energy(spec, eta + cplx(e) * phi) - 2 * F0 + nonlinear_energy(spec, eta - cplx(e) * phi)) / (e * e);
    const double an2 = real_inner(linearized_action(spec, re, phi), phi);
    EXPECT_NEAR(fd2, an2, 1e-5 * (1.0 + std::abs(an2)));
  }
}

TEST(Conditions, PowerLaw) {
  const auto d1 = verify_conditions(cubic, 1);
  ASSERT_NE(d1.find("stability"), nullptr);
  EXPECT_TRUE(d1.find("stability")->pass);
  EXPECT_TRUE(d1.find("monotonicity")->pass);
  EXPECT_TRUE(d1.all_pass());
  EXPECT_FALSE(verify_conditions(cubic, 2).find("stability")->pass);
  EXPECT_FALSE(verify_conditions(NonlinearitySpec::power(3.0, 1.0), 1).find("stability")->pass);
  EXPECT_FALSE(verify_conditions(NonlinearitySpec::power(1.0, 0.0), 1).find("existence")->pass);
}

TEST(Potential, DeclaredScale) {
  const auto V = PotentialSpec::cosine_from_eps(1, -0.5, 0.05, 1.0);
  EXPECT_NEAR(V.eps_V(), 0.05, 1e-15);
  EXPECT_NEAR(V.sup_gradient(), 0.5 * V.rate()[0], 1e-15);
  EXPECT_THROW(PotentialSpec::cosine(1, -0.5, {0.1, 0.0}, 1.0, 0.2), Error);
  const auto G = PotentialSpec::gaussian_well_from_eps(2, 1.0, 0.03, 2.0);
  EXPECT_NEAR(G.sup_gradient() / std::sqrt(2.0), 0.03, 1e-12);
  // analytic gradient against a centred difference
  const std::array<double, 2> x{0.7, -0.3};
  const double h = 1e-5;
  for (int j = 0; j < 2; ++j) {
    auto xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    EXPECT_NEAR(G.gradient(x)[j], (G.value(xp) - G.value(xm)) / (2 * h), 1e-9);
  }
}
