#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "../oracle_values.hpp"
#include "nlsdyn/error.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/linearization.hpp"
#include "nlsdyn/profile.hpp"
#include "nlsdyn/spectral.hpp"

using namespace nlsdyn;

namespace {

const NonlinearitySpec cubic = NonlinearitySpec::power(1.0, 1.0);

const RadialProfile& cubic1() {
  static const RadialProfile p = solve_profile(cubic, 1.0, 1);
  return p;
}

const SpectralReport& cubic_report() {
  static const SpectralReport r = [] {
    CertifyOptions o;
    o.k_max = 1;
    return certify(cubic1(), cubic, o);
  }();
  return r;
}

}  // namespace

TEST(Assemble, CubicPotentials) {
  const auto ops = assemble_operators(cubic1(), cubic, 1);
  const auto& L1 = ops.radial_op(1, 0);
  const auto& L2 = ops.radial_op(2, 0);
  for (std::size_t i = 0; i < L1.size(); i += 101) {
    const double s2 = 1.0 / (std::cosh(L1.r[i]) * std::cosh(L1.r[i]));
    EXPECT_NEAR(L1.potential[i], -6.0 * s2, 1e-8);
    EXPECT_NEAR(L2.potential[i], -2.0 * s2, 1e-8);
  }
  EXPECT_THROW(assemble_operators(cubic1(), cubic, 9), Error);
}

TEST(Assemble, AngularSectors) {
  const auto p = solve_profile(cubic, 1.0, 2);
  AssemblyOptions o;
  o.radial_points = 512;
  const auto ops = assemble_operators(p, cubic, 3, o);
  EXPECT_DOUBLE_EQ(ops.radial_op(1, 1).lambda_k, 1.0);
  EXPECT_DOUBLE_EQ(ops.radial_op(1, 2).lambda_k, 4.0);
  // A_{μ,k} - A_{μ,1} is the positive multiplication (λ_k - λ_1)/r²
  const auto& a1 = ops.radial_op(1, 1);
  for (int k = 2; k <= 3; ++k) {
    const auto& ak = ops.radial_op(1, k);
    for (std::size_t i = 0; i < ak.size(); ++i) ASSERT_GE(ak.diag[i] - a1.diag[i], 0.0);
  }
}

TEST(Assemble, HartreeSelfAdjoint) {
  const auto spec = NonlinearitySpec::hartree_gaussian(1.0, 1.0);
  const auto p = solve_profile(spec, 1.0, 1);
  AssemblyOptions o;
  o.full_points = 256;
  const auto ops = assemble_operators(p, spec, 1, o);
  for (int b : {1, 2}) {
    const auto& M = ops.full_op(b).matrix;
    EXPECT_LT((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-12 * M.cwiseAbs().maxCoeff());
  }
  // <u, L v> = <L u, v> through the matrix-free action on random pairs
  const auto g = certification_grid(p);
  const RealField eta = real_part(synthesize(p, SolitonParams{}, g));
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  ComplexField u(g), v(g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = g->point(i)[0];
    u[i] = cplx(n(rng), n(rng)) * std::exp(-0.1 * x * x);
    v[i] = cplx(n(rng), n(rng)) * std::exp(-0.1 * x * x);
  }
  const double a = real_inner(u, apply_linearized(spec, eta, 1.0, v));
  const double b = real_inner(apply_linearized(spec, eta, 1.0, u), v);
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
}

TEST(Spectrum, PoschlTeller) {
  const auto& r = cubic_report();
  EXPECT_EQ(r.negative_L1, 1);
  EXPECT_EQ(r.negative_L2, 0);
  ASSERT_GE(r.lowest_L1.size(), 2u);
  EXPECT_NEAR(r.lowest_L1[0], oracle::kL1Ground, 1e-4);
  EXPECT_NEAR(r.lowest_L1[1], oracle::kL1Zero, 1e-4);
  EXPECT_LT(std::abs(r.zero_eigenvalue_L2 - oracle::kL2Zero), 1e-5);
  EXPECT_GT(r.zero_overlap_L2, 0.999);
  EXPECT_GT(r.zero_overlap_L1, 0.999);
  EXPECT_TRUE(r.condition_F);
  EXPECT_LT(r.null_residual_L2, 1e-6);
}

TEST(Spectrum, ZeroModeAlgebra) {
  const auto& r = cubic_report();
  for (double res : r.algebra_residual) EXPECT_LT(res, 1e-6);
  EXPECT_NEAR(r.eta_L1inv_eta, -1.0, 1e-5);
}

TEST(Spectrum, SectorMonotonicity) {
  const auto p = solve_profile(cubic, 1.0, 2);
  CertifyOptions o;
  o.k_max = 4;
  o.assembly.radial_points = 1024;
  const auto r = certify(p, cubic, o);
  for (int k = 2; k <= 4; ++k) EXPECT_GT(r.sector_min[k], r.sector_min[k - 1]);
  EXPECT_EQ(r.negative_L1, 1);
  // critical law: m' = 0, the symplectic form degenerates
  EXPECT_FALSE(r.omega.has_value());
  EXPECT_FALSE(r.omega_error.empty());
}

TEST(Omega, CubicPattern) {
  const auto& r = cubic_report();
  ASSERT_TRUE(r.omega.has_value());
  const auto& W = r.omega->omega_inv;
  const double expected[4][4] = {{0, -2, 0, 0}, {2, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(W(i, j), expected[i][j], 1e-8) << i << "," << j;
  EXPECT_LT(r.omega->antisymmetry_error, 1e-10);
  EXPECT_LT(r.omega->inverse_error, 1e-8);
}

TEST(Omega, InvariantUnderSymmetries) {
  const auto g = make_grid(1, 2048, 60.0);
  const auto base = omega_matrix(tangent_frame(cubic1(), SolitonParams{}, g), cubic1());
  const auto moved = omega_matrix(tangent_frame(cubic1(), SolitonParams{{5.0, 0.0}, {0.7, 0.0}, 2.0, 1.0}, g), cubic1());
  EXPECT_LT((base.omega_inv - moved.omega_inv).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Coercivity, CubicAgainstOracle) {
  const auto& r = cubic_report();
  ASSERT_TRUE(r.rho.has_value());
  EXPECT_GT(*r.rho, 0.0);
  EXPECT_LE(*r.rho, 1.0);
  EXPECT_LT(std::abs(r.rho_refined - *r.rho) / *r.rho, 0.01);
  EXPECT_NEAR(r.rho_refined / oracle::kRhoCubic1D, 1.0, 0.01);
  EXPECT_LT(r.rho_unconstrained, 0.0);
  EXPECT_NEAR(r.rho_unconstrained / oracle::kUnconstrainedMin, 1.0, 0.01);
}

TEST(Coercivity, Hartree) {
  const auto spec = NonlinearitySpec::hartree_gaussian(1.0, 1.0);
  const auto p = solve_profile(spec, 1.0, 1);
  CertifyOptions o;
  o.k_max = 1;
  o.assembly.full_points = 256;
  o.coercivity.points = 256;
  const auto r = certify(p, spec, o);
  EXPECT_EQ(r.negative_L1, 1);
  EXPECT_EQ(r.negative_L2, 0);
  EXPECT_TRUE(r.condition_F);
  ASSERT_TRUE(r.rho.has_value());
  EXPECT_GT(*r.rho, 0.0);
  EXPECT_LE(*r.rho, 1.0);
}
