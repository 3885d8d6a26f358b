#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "../oracle_values.hpp"
#include "nlsdyn/error.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/model.hpp"
#include "nlsdyn/profile.hpp"
#include "nlsdyn/profile_family.hpp"
#include "nlsdyn/spectral.hpp"

using namespace nlsdyn;

namespace {

const NonlinearitySpec cubic = NonlinearitySpec::power(1.0, 1.0);

const RadialProfile& cubic1() {
  static const RadialProfile p = solve_profile(cubic, 1.0, 1);
  return p;
}

double max_abs(const ComplexField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

}  // namespace

TEST(Profile, CubicSech) {
  const auto& p = cubic1();
  EXPECT_NEAR(p.eta0(), std::sqrt(2.0), 1e-9);
  double dev = 0.0;
  for (std::size_t i = 0; i < p.size() && p.r[i] <= 20.0; ++i)
    dev = std::max(dev, std::abs(p.eta.f[i] - std::sqrt(2.0) / std::cosh(p.r[i])));
  EXPECT_LT(dev, 1e-8);
  EXPECT_LT(p.residual, 1e-9 * p.eta0());
  for (std::size_t i = 1; i < p.size(); ++i) {
    ASSERT_GT(p.eta.f[i], 0.0);
    ASSERT_LE(p.eta.f[i], p.eta.f[i - 1]);
  }
  EXPECT_LT(p.eta.f.back(), 1e-10 * p.eta0());
}

TEST(Profile, ScalingInMu) {
  const auto p4 = solve_profile(cubic, 4.0, 1);
  EXPECT_NEAR(p4.eta0(), std::sqrt(8.0), 1e-8);
  const auto quint = NonlinearitySpec::power(2.0, 1.0);
  const auto q1 = solve_profile(quint, 1.0, 1);
  for (double mu : {0.5, 1.5, 2.0}) {
    const auto q = solve_profile(quint, mu, 1);
    EXPECT_NEAR(q.eta0(), std::pow(mu, 0.25) * q1.eta0(), 1e-8);
    EXPECT_NEAR(q.mass / q1.mass, std::pow(mu, 0.5 - 0.5), 1e-6);
  }
}

TEST(Profile, TownesProfile) {
  const auto p = solve_profile(cubic, 1.0, 2);
  EXPECT_NEAR(p.eta0(), oracle::kEta0Townes, 1e-3);
  EXPECT_LT(p.residual, 1e-9 * p.eta0());
}

TEST(Profile, ExponentialDecay) {
  for (double mu : {0.5, 2.0}) {
    const auto p = solve_profile(cubic, mu, 1);
    std::size_t i = 0;
    while (i + 1 < p.size() && p.eta.f[i] > 1e-8 * p.eta0()) ++i;
    const std::size_t j = i - 200;
    const double slope = (std::log(p.eta.f[i]) - std::log(p.eta.f[j])) / (p.r[i] - p.r[j]);
    EXPECT_NEAR(slope / -std::sqrt(mu), 1.0, 0.02);
  }
}

TEST(MuDerivative, CubicValues) {
  const auto& p = cubic1();
  EXPECT_NEAR(p.dmu.f[0], std::sqrt(2.0) / 2.0, 1e-8);
  EXPECT_NEAR(p.dmass, 1.0, 1e-5);
  EXPECT_LT(p.mu_residual, 1e-8);
  const auto linear_solve = mu_derivative(p, cubic);
  const auto scaling = power_mu_derivative(p, 1.0);
  for (std::size_t i = 0; i < p.size(); i += 37) EXPECT_NEAR(linear_solve[i], scaling[i], 1e-8);
}

TEST(MuDerivative, CentralDifference) {
  const auto& p = cubic1();
  double prev = 0.0;
  for (double d : {0.02, 0.01}) {
    const auto hi = solve_profile(cubic, 1.0 + d, 1), lo = solve_profile(cubic, 1.0 - d, 1);
    double err = 0.0;
    for (double r = 0.0; r < 15.0; r += 0.25)
      err = std::max(err, std::abs((hi.interpolate(hi.eta, r) - lo.interpolate(lo.eta, r)) / (2 * d) -
                                   p.interpolate(p.dmu, r)));
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.4);
    prev = err;
  }
}

TEST(MassCurve, CubicAndSupercritical) {
  const auto c = mass_curve(cubic, {0.5, 1.0, 2.0, 4.0}, 1);
  for (std::size_t i = 0; i < c.mu.size(); ++i) EXPECT_NEAR(c.m[i] / (2.0 * std::sqrt(c.mu[i])), 1.0, 1e-6);
  EXPECT_NEAR(c.dm[1], 1.0, 1e-5);
  EXPECT_TRUE(c.stable);
  const auto s3 = mass_curve(NonlinearitySpec::power(3.0, 1.0), {1.0}, 1);
  EXPECT_LT(s3.dm[0], 0.0);
  EXPECT_FALSE(s3.stable);
}

TEST(Synthesize, SymmetriesAndMomentum) {
  const auto g = make_grid(1, 2048, 60.0);
  const auto& p = cubic1();
  const auto rest = synthesize(p, SolitonParams{}, g);
  std::size_t imax = 0;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    EXPECT_EQ(rest[i].imag(), 0.0);
    EXPECT_GE(rest[i].real(), 0.0);
    if (std::abs(g->point(i)[0]) < 20.0) EXPECT_GT(rest[i].real(), 0.0);
    if (rest[i].real() > rest[imax].real()) imax = i;
  }
  EXPECT_EQ(g->point(imax)[0], 0.0);
  SolitonParams s{{3.0, 0.0}, {0.4, 0.0}, 0.3, 1.0};
  const auto a = synthesize(p, s, g);
  s.gamma += 0.5;
  const auto b = synthesize(p, s, g);
  EXPECT_LT(max_abs(b - std::polar(1.0, 0.5) * a), 1e-15);
  SolitonParams pi{{0.0, 0.0}, {0.0, 0.0}, std::numbers::pi, 1.0};
  EXPECT_LT(max_abs(synthesize(p, pi, g) + rest), 1e-15);
  const SolitonParams boosted{{0.0, 0.0}, {0.4, 0.0}, 0.0, 1.0};
  EXPECT_NEAR(momentum(synthesize(p, boosted, g))[0], p.mass * 0.4, 1e-8);
  const SolitonParams edge{{55.0, 0.0}, {0.0, 0.0}, 0.0, 1.0};
  EXPECT_THROW(synthesize(p, edge, g), Error);
}

TEST(TangentFrame, FiniteDifferencesInSigma) {
  const auto g = make_grid(1, 2048, 60.0);
  ProfileFamily fam(cubic, 1, 0.5, 2.0);
  const SolitonParams s{{1.5, 0.0}, {0.3, 0.0}, 0.2, 1.0};
  const auto frame = tangent_frame(*fam.at(1.0), s, g);
  ASSERT_EQ(frame.count(), 4u);
  auto shifted = [&](int which, double d) {
    SolitonParams t = s;
    if (which == 0) {
      t.a[0] += d;
      t.gamma += 0.5 * t.v[0] * d;  // modified derivative ∂_a + ½v∂_γ
    }
    if (which == 1) t.v[0] += d;
    if (which == 2) t.gamma += d;
    if (which == 3) t.mu += d;
    return synthesize(*fam.at(t.mu), t, g);
  };
  const double scale[4] = {1.0, 0.5, 1.0, 1.0};  // z_b = ixη pairs with ∂_v via the factor ½
  for (int j = 0; j < 4; ++j) {
    double prev = 0.0;
    for (double d : {1e-3, 5e-4}) {
      const auto fd = cplx(1.0 / (2 * d)) * (shifted(j, d) - shifted(j, -d));
      const double err = l2_norm(fd - cplx(scale[j]) * frame.z[j]);
      if (prev > 0.0 && prev > 1e-9) EXPECT_GT(prev / err, 3.0) << "frame direction " << j;
      EXPECT_LT(err, 1e-5) << "frame direction " << j;
      prev = err;
    }
  }
}

TEST(TangentFrame, SymplecticEntries) {
  const auto g = make_grid(1, 2048, 60.0);
  const auto frame = tangent_frame(cubic1(), SolitonParams{}, g);
  EXPECT_NEAR(symplectic(frame.gauge(), frame.scaling()), 1.0, 1e-8);
  EXPECT_NEAR(std::abs(symplectic(frame.translation(0), frame.boost(0))), 2.0, 1e-8);
  EXPECT_NEAR(symplectic(frame.translation(0), frame.gauge()), 0.0, 1e-12);
}

TEST(FrameTransform, RoundTripAndIdentity) {
  const auto g = make_grid(1, 2048, 60.0);
  const auto& p = cubic1();
  const SolitonParams rest{};
  const auto eta = synthesize(p, rest, g);
  EXPECT_LT(max_abs(frame_transform(eta, rest) - eta), 1e-15);
  const SolitonParams s{{4.0, 0.0}, {-0.6, 0.0}, 1.1, 1.0};
  const auto psi = synthesize(p, s, g);
  EXPECT_LT(max_abs(frame_transform(psi, s) - eta), 1e-10);
  const auto back = frame_inverse(frame_transform(psi, s), s);
  EXPECT_LT(max_abs(back - psi), 1e-12);
  EXPECT_NEAR(l2_norm(frame_transform(psi, s)), l2_norm(psi), 1e-12);
}
