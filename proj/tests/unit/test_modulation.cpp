#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nlsdyn/error.hpp"
#include "nlsdyn/fit.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/modulation.hpp"
#include "nlsdyn/profile_family.hpp"
#include "nlsdyn/spectral.hpp"

using namespace nlsdyn;

namespace {

const NonlinearitySpec cubic = NonlinearitySpec::power(1.0, 1.0);

const ProfileFamily& family() {
  static const ProfileFamily f(cubic, 1, 0.5, 2.0);
  return f;
}

GridPtr line() {
  static const GridPtr g = make_grid(1, 2048, 60.0);
  return g;
}

ComplexField skew_direction(const SolitonParams& s, unsigned seed) {
  const auto g = line();
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  const cplx c0(n(rng), n(rng)), c1(n(rng), n(rng));
  ComplexField q(g);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double x = g->point(i)[0] - s.a[0];
    q[i] = (c0 + c1 * x) * std::exp(-0.5 * (x - 0.5) * (x - 0.5));
  }
  q = project_skew_orthogonal(q, tangent_frame(*family().at(s.mu), s, g));
  q *= cplx(1.0 / h1_norm(q));
  return q;
}

double max_abs(const ComplexField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

}  // namespace

TEST(Decompose, ExactSoliton) {
  const SolitonParams s{{2.0, 0.0}, {0.3, 0.0}, 0.7, 1.2};
  const auto psi = synthesize(*family().at(s.mu), s, line());
  SolitonParams guess = s;
  guess.a[0] += 0.05;
  guess.mu -= 0.02;
  const auto st = decompose(psi, guess, family());
  EXPECT_LT(st.w_h1, 1e-10);
  EXPECT_NEAR(st.sigma.a[0], s.a[0], 1e-10);
  EXPECT_NEAR(st.sigma.mu, s.mu, 1e-10);
  const auto exact = decompose(psi, s, family());
  EXPECT_LT(exact.w_l2, 1e-11);
  EXPECT_LE(exact.iterations, 2);
}

TEST(Decompose, GaugeDirection) {
  const SolitonParams s{{0.0, 0.0}, {0.0, 0.0}, 0.0, 1.0};
  const auto psi = std::polar(1.0, 0.3) * synthesize(*family().at(1.0), s, line());
  const auto st = decompose(psi, s, family());
  EXPECT_NEAR(st.sigma.gamma, 0.3, 1e-10);
  EXPECT_LT(st.w_l2, 1e-10);
}

TEST(Decompose, SkewOrthogonalPerturbation) {
  const SolitonParams s{{-1.0, 0.0}, {0.2, 0.0}, 0.4, 1.0};
  const auto p = skew_direction(s, 7);
  const double eps = 1e-3;
  const auto psi = synthesize(*family().at(1.0), s, line()) + cplx(eps) * p;
  const auto st = decompose(psi, s, family());
  EXPECT_NEAR(st.sigma.a[0], s.a[0], 1e-9);
  EXPECT_NEAR(st.sigma.v[0], s.v[0], 1e-9);
  EXPECT_NEAR(st.sigma.gamma, s.gamma, 1e-9);
  EXPECT_NEAR(st.sigma.mu, s.mu, 1e-9);
  EXPECT_LT(max_abs(frame_inverse(st.w, st.sigma) - cplx(eps) * p), 1e-9);
  EXPECT_LT(st.constraint_residual, 1e-10 * l2_norm(synthesize(*family().at(1.0), SolitonParams{}, line())));
}

TEST(Decompose, RoundTrip) {
  const SolitonParams s{{1.0, 0.0}, {-0.4, 0.0}, 2.0, 0.9};
  auto psi = synthesize(*family().at(0.9), s, line()) + cplx(0.02) * skew_direction(s, 8);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += 0.01 * std::exp(-std::pow(line()->point(i)[0] - 2.0, 2));
  const auto st = decompose(psi, s, family());
  const auto back = synthesize(*family().at(st.sigma.mu), st.sigma, line()) + frame_inverse(st.w, st.sigma);
  EXPECT_LT(h1_norm(back - psi), 1e-10);
  for (double g : constraint_values(psi, st.sigma, *family().at(st.sigma.mu))) EXPECT_LT(std::abs(g), 1e-10 * 2.0);
}

TEST(Decompose, LeavesParameterDomain) {
  const auto far = solve_profile(cubic, 3.0, 1);
  const auto psi = synthesize(far, SolitonParams{{0.0, 0.0}, {0.0, 0.0}, 0.0, 3.0}, line());
  EXPECT_THROW(decompose(psi, SolitonParams{{0.0, 0.0}, {0.0, 0.0}, 0.0, 1.9}, family()), Error);
}

TEST(Alpha, FreeFlowVanishes) {
  const auto V = PotentialSpec::zero(1);
  std::vector<ModulationState> states;
  for (int i = 0; i < 5; ++i) {
    ModulationState st;
    st.t = 0.1 * i;
    st.sigma = SolitonParams{{1.0 + 0.4 * st.t, 0.0}, {0.4, 0.0}, 0.3 + (1.0 + 0.04) * st.t, 1.0};
    states.push_back(st);
  }
  const auto a = alpha_residuals(states, V);
  ASSERT_EQ(a.size(), 3u);
  for (const auto& r : a) EXPECT_LT(r.alpha_norm, 1e-6);
}

TEST(DeltaX, ZeroFluctuation) {
  ModulationState st;
  st.sigma = SolitonParams{{0.0, 0.0}, {0.0, 0.0}, 0.0, 1.0};
  st.w = ComplexField(line());
  const std::vector<double> alpha(4, 0.0);
  const auto free = delta_X_eval(st, alpha, PotentialSpec::zero(1), cubic, family());
  for (double x : free.value) EXPECT_EQ(x, 0.0);
  double prev = 0.0;
  for (double eps : {0.1, 0.05}) {
    st.sigma.a[0] = 0.5 / (2 * eps);
    const auto dx = delta_X_eval(st, alpha, PotentialSpec::cosine_from_eps(1, -0.5, eps, 1.0), cubic, family());
    double n = 0.0;
    for (double x : dx.value) n = std::max(n, std::abs(x));
    EXPECT_GT(n, 0.0);
    if (prev > 0.0) EXPECT_NEAR(prev / n, 4.0, 0.6);
    prev = n;
  }
}

TEST(DeltaX, QuadraticRemainder) {
  const SolitonParams s{};
  ModulationState st;
  st.sigma = s;
  const std::vector<double> alpha(4, 0.0);
  st.w = cplx(0.02) * skew_direction(s, 9);
  const double big = delta_X_eval(st, alpha, PotentialSpec::zero(1), cubic, family()).nonlinear_part;
  st.w = cplx(0.01) * skew_direction(s, 9);
  const double small = delta_X_eval(st, alpha, PotentialSpec::zero(1), cubic, family()).nonlinear_part;
  EXPECT_GE(big / small, 3.5);
}

TEST(Lyapunov, QuadraticGapAndLowerBound) {
  const SolitonParams s{};
  const auto& prof = *family().at(1.0);
  const double rho = 0.3237;
  ModulationState st;
  st.sigma = s;
  st.w = ComplexField(line());
  EXPECT_NEAR(lyapunov_gap(st, cubic, prof, rho).delta_E, 0.0, 1e-15);
  const auto p = skew_direction(s, 10);
  std::vector<double> eps{0.01, 0.02, 0.04}, gap;
  for (double e : eps) {
    st.w = cplx(e) * p;
    st.w_h1 = h1_norm(st.w);
    const auto r = lyapunov_gap(st, cubic, prof, rho);
    gap.push_back(std::abs(r.delta_E));
    ASSERT_TRUE(r.lower_bound_ok.has_value());
    EXPECT_TRUE(*r.lower_bound_ok);
  }
  EXPECT_GE(fit_loglog(eps, gap).slope, 1.8);
  st.w = cplx(0.1) * p;
  st.w_h1 = h1_norm(st.w);
  EXPECT_FALSE(lyapunov_gap(st, cubic, prof, rho).lower_bound_ok.has_value());
}

TEST(Track, FreeSolitonShortRun) {
  const SolitonParams s{{0.0, 0.0}, {0.4, 0.0}, 0.0, 1.0};
  const auto psi = synthesize(*family().at(1.0), s, line());
  EvolutionConfig cfg;
  cfg.t_end = 5.0;
  std::size_t calls = 0, with_alpha = 0;
  const auto tr = track(psi, s, cfg, PotentialSpec::zero(1), cubic, family(), 0.3237, {},
                        [&](const ModulationState&, const LyapunovRecord&, const AlphaRecord* a) {
                          ++calls;
                          if (a) ++with_alpha;
                        });
  ASSERT_TRUE(tr.ok) << tr.message;
  EXPECT_EQ(calls, tr.states.size());
  EXPECT_EQ(with_alpha, tr.states.size() - 2);
  for (const auto& st : tr.states) {
    EXPECT_NEAR(st.sigma.a[0], 0.4 * st.t, 1e-8);
    EXPECT_LT(st.w_h1, 1e-4);
  }
  for (const auto& a : tr.alpha) EXPECT_LT(a.alpha_norm, 1e-4);
}
