#include "nlsdyn/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Sparse>
#include <fmt/format.h>
#include <lapacke.h>

#include "nlsdyn/error.hpp"
#include "nlsdyn/spectral.hpp"

namespace nlsdyn {
namespace {

constexpr double kD1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
constexpr double kD2c = -205.0 / 72.0;
constexpr double kD2[4] = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};

// Sample with reflection at r = 0 and zero past the last node.
inline double at(const std::vector<double>& f, int j, int parity) {
  const int n = static_cast<int>(f.size());
  if (j < 0) return parity * f[-j];
  if (j >= n) return 0.0;
  return f[j];
}

double fd1(const std::vector<double>& f, int i, double h, int parity) {
  double s = 0.0;
  for (int m = 1; m <= 4; ++m) s += kD1[m - 1] * (at(f, i + m, parity) - at(f, i - m, parity));
  return s / h;
}

double fd2(const std::vector<double>& f, int i, double h, int parity) {
  double s = kD2c * at(f, i, parity);
  for (int m = 1; m <= 4; ++m) s += kD2[m - 1] * (at(f, i + m, parity) + at(f, i - m, parity));
  return s / (h * h);
}

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Discrete -Δ_r on even functions (8th order).
struct RadialLaplacian {
  int n;
  int d;
  double h;

  double apply_at(const std::vector<double>& u, int i) const {
    if (i == 0) return -d * fd2(u, 0, h, 1);
    const double r = i * h;
    return -fd2(u, i, h, 1) - (d - 1) / r * fd1(u, i, h, 1);
  }

  std::vector<double> apply(const std::vector<double>& u) const {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = apply_at(u, i);
    return out;
  }

  // -Δ_r + diag(shift).
  SpMat matrix(const std::vector<double>& shift) const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n) * 9);
    const double h2 = h * h;
    auto add = [&](int row, int col, double v) {
      if (col >= n) return;
      t.emplace_back(row, col < 0 ? -col : col, v);
    };
    for (int i = 0; i < n; ++i) {
      const double w2 = i == 0 ? -d / h2 : -1.0 / h2;
      const double w1 = i == 0 ? 0.0 : -(d - 1) / (i * h) / h;
      add(i, i, w2 * kD2c + shift[i]);
      for (int m = 1; m <= 4; ++m) {
        add(i, i + m, w2 * kD2[m - 1] + w1 * kD1[m - 1]);
        add(i, i - m, w2 * kD2[m - 1] - w1 * kD1[m - 1]);
      }
    }
    SpMat A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    return A;
  }
};

double local_f(const NonlinearitySpec& s, double eta) { return s.h(eta * eta) * eta; }

double local_f1(const NonlinearitySpec& s, double eta) {
  const double p = eta * eta;
  return s.h(p) + 2.0 * s.dh(p) * p;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> local_residual(const RadialLaplacian& L, const NonlinearitySpec& spec, double mu,
                                   const std::vector<double>& eta) {
  auto r = L.apply(eta);
  for (int i = 0; i < L.n; ++i) r[i] += mu * eta[i] - local_f(spec, eta[i]);
  return r;
}

// Level where h(η²) = μ, the linear-scaling amplitude.
double linear_amplitude(const NonlinearitySpec& spec, double mu) {
  if (spec.kind() == NonlinearitySpec::Kind::power) return std::pow(mu / spec.coupling(), 0.5 / spec.exponent());
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200 && spec.h(hi * hi) < mu; ++k) hi *= 2.0;
  if (spec.h(hi * hi) < mu) throw NumericalError("linear amplitude search failed: h stays below mu");
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (spec.h(mid * mid) < mu ? lo : hi) = mid;
  }
  return hi;
}

struct ShotResult {
  int outcome;  // +1 crossed zero, -1 turned upward, 0 reached the end
  double r_stop;
};

// Integrates η'' = μη - f(η) - (d-1)/r η' from r = 0; samples every `stride` steps.
ShotResult shoot(const NonlinearitySpec& spec, double mu, int d, double eta0, double step, double r_end,
                 std::vector<double>* samples, int stride, double cut_level) {
  auto rhs = [&](double r, double y, double yp) {
    const double drag = r > 0.0 ? (d - 1) / r * yp : 0.0;
    return mu * y - local_f(spec, y) - drag;
  };
  // Resolve the fastest local oscillation near r = 0.
  const double stiff = std::sqrt(std::abs(mu - local_f1(spec, eta0)) + mu);
  const int sub = std::max(1, static_cast<int>(std::ceil(step * stiff / 0.05)));
  const double dr = step / sub;
  double r = 0.0, y = eta0, yp = 0.0;
  if (samples) samples->assign(1, y);
  long first = 0;
  if (d > 1) {
    // Series start avoids the 1/r singularity.
    const double c = (mu * eta0 - local_f(spec, eta0)) / d;
    r = dr;
    y = eta0 + 0.5 * c * dr * dr;
    yp = c * dr;
    first = 1;
  }
  const long steps = static_cast<long>(std::ceil(r_end / step)) * sub;
  for (long k = first; k < steps; ++k) {
    const double k1y = yp, k1p = rhs(r, y, yp);
    const double k2y = yp + 0.5 * dr * k1p, k2p = rhs(r + 0.5 * dr, y + 0.5 * dr * k1y, k2y);
    const double k3y = yp + 0.5 * dr * k2p, k3p = rhs(r + 0.5 * dr, y + 0.5 * dr * k2y, k3y);
    const double k4y = yp + dr * k3p, k4p = rhs(r + dr, y + dr * k3y, k4y);
    y += dr / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    yp += dr / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    r += dr;
    if (samples && (k + 1) % (static_cast<long>(stride) * sub) == 0) samples->push_back(y);
    if (!std::isfinite(y) || y < 0.0) return {+1, r};
    if (yp > 0.0) return {-1, r};
    if (cut_level > 0.0 && y < cut_level) return {0, r};
  }
  return {0, r};
}

std::pair<double, double> shooting_bracket(const NonlinearitySpec& spec, double mu, int d, double step, double r_end) {
  double lo = linear_amplitude(spec, mu);
  double hi = 10.0 * lo;
  for (int k = 0; k < 60 && shoot(spec, mu, d, hi, step, r_end, nullptr, 1, 0.0).outcome != +1; ++k) hi *= 2.0;
  for (int k = 0; k < 60 && shoot(spec, mu, d, lo, step, r_end, nullptr, 1, 0.0).outcome != -1; ++k) lo *= 0.5;
  if (shoot(spec, mu, d, hi, step, r_end, nullptr, 1, 0.0).outcome != +1 ||
      shoot(spec, mu, d, lo, step, r_end, nullptr, 1, 0.0).outcome != -1)
    throw NumericalError(fmt::format("shooting: no sign change found for mu={}", mu));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const auto res = shoot(spec, mu, d, mid, step, r_end, nullptr, 1, 0.0);
    if (res.outcome == +1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi};
}

// Decay shape of the linear tail.
double tail_shape(int d, double mu, double r) {
  const double k = std::sqrt(mu);
  return d == 1 ? std::exp(-k * r) : std::exp(-k * r) / std::sqrt(std::max(r, 1e-300));
}

void replace_tail(std::vector<double>& eta, double h, int d, double mu, double level) {
  const int n = static_cast<int>(eta.size());
  int c = -1;
  for (int i = 1; i < n; ++i)
    if (eta[i] < level) {
      c = i;
      break;
    }
  if (c < 0) return;
  const double base = eta[c] > 0.0 ? eta[c] : level;
  const double tc = tail_shape(d, mu, c * h);
  for (int i = c; i < n; ++i) eta[i] = base * tail_shape(d, mu, i * h) / tc;
}

std::vector<double> shooting_guess(const NonlinearitySpec& spec, double mu, int d, double h, int n) {
  const double r_end = n * h;
  const auto [lo, hi] = shooting_bracket(spec, mu, d, h, r_end);
  std::vector<double> s;
  shoot(spec, mu, d, lo, h, r_end, &s, 1, 1e-6 * lo);
  std::vector<double> eta(n, 0.0);
  const int have = std::min<int>(n, static_cast<int>(s.size()));
  for (int i = 0; i < have; ++i) eta[i] = s[i];
  int last = have - 1;
  while (last > 1 && !(eta[last] > 0.0 && eta[last] < eta[last - 1])) --last;
  const double tc = tail_shape(d, mu, last * h);
  for (int i = last + 1; i < n; ++i) eta[i] = eta[last] * tail_shape(d, mu, i * h) / tc;
  (void)hi;
  return eta;
}

std::vector<double> petviashvili_radial(const NonlinearitySpec& spec, double mu, const RadialLaplacian& L) {
  const int n = L.n;
  const double amp = 2.0 * linear_amplitude(spec, mu);
  std::vector<double> eta(n);
  for (int i = 0; i < n; ++i) {
    const double r = i * L.h;
    eta[i] = amp * std::exp(-0.5 * mu * r * r);
  }
  SpMat M = L.matrix(std::vector<double>(n, mu));
  Eigen::SparseLU<SpMat> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) throw NumericalError("Petviashvili: factorization of -Δ_r + μ failed");
  const double p = spec.homogeneity();
  const double gamma = p / (p - 1.0);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::pow(std::max(i * L.h, 0.5 * L.h), L.d - 1);
  double change = INFINITY;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> fe(n);
    for (int i = 0; i < n; ++i) fe[i] = local_f(spec, eta[i]);
    const auto Me = L.apply(eta);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += w[i] * eta[i] * (Me[i] + mu * eta[i]);
      den += w[i] * eta[i] * fe[i];
    }
    if (!(den > 0.0) || !std::isfinite(num))
      throw NumericalError(fmt::format("Petviashvili diverged at iteration {} (stabilizing ratio undefined)", it));
    const double S = std::pow(num / den, gamma);
    Vec rhs = Eigen::Map<Vec>(fe.data(), n);
    Vec next = lu.solve(rhs) * S;
    change = 0.0;
    for (int i = 0; i < n; ++i) {
      change = std::max(change, std::abs(next[i] - eta[i]));
      eta[i] = next[i];
    }
    if (!(eta[0] > 0.0) || !std::isfinite(eta[0]))
      throw NumericalError(fmt::format("Petviashvili produced a non-positive iterate at iteration {}", it));
    if (change < 1e-10 * eta[0]) return eta;
  }
  throw NumericalError(fmt::format("Petviashvili did not converge; last update {:.3e}", change));
}

struct NewtonOutcome {
  std::vector<double> eta;
  double residual;
};

NewtonOutcome newton_polish(const NonlinearitySpec& spec, double mu, const RadialLaplacian& L, std::vector<double> eta) {
  const int n = L.n;
  double res = sup_abs(local_residual(L, spec, mu, eta));
  for (int it = 0; it < 30; ++it) {
    auto R = local_residual(L, spec, mu, eta);
    res = sup_abs(R);
    std::vector<double> shift(n);
    for (int i = 0; i < n; ++i) shift[i] = mu - local_f1(spec, eta[i]);
    SpMat J = L.matrix(shift);
    Eigen::SparseLU<SpMat> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw NumericalError("Newton polish: Jacobian factorization failed");
    Vec rhs = -Eigen::Map<Vec>(R.data(), n);
    Vec delta = lu.solve(rhs);
    double step = 0.0;
    for (int i = 0; i < n; ++i) {
      eta[i] += delta[i];
      step = std::max(step, std::abs(delta[i]));
    }
    if (!(eta[0] > 0.0) || !std::isfinite(eta[0]))
      throw NumericalError(fmt::format("Newton polish left the positive cone (last residual {:.3e})", res));
    if (step < 1e-15 * eta[0]) break;
  }
  return {std::move(eta), res};
}

void check_shape(const std::vector<double>& eta, bool monotone, const std::string& what) {
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!(eta[i] > 0.0))
      throw NumericalError(fmt::format("{}: non-positive profile value at node {}", what, i));
    if (monotone && i > 0 && eta[i] > eta[i - 1])
      throw NumericalError(fmt::format("{}: profile not decreasing at node {}", what, i));
  }
}

double smallest_magnitude_eigenvalue(const Eigen::SparseLU<SpMat>& lu, int n) {
  Vec v = Vec::Ones(n).normalized();
  double est = 0.0;
  for (int k = 0; k < 12; ++k) {
    Vec u = lu.solve(v);
    const double nu = u.norm();
    if (!(nu > 0.0) || !std::isfinite(nu)) return 0.0;
    est = 1.0 / nu;
    v = u / nu;
  }
  return est;
}

void fill_profile_common(RadialProfile& p) {
  radial_fd_derivatives(p.eta.f, p.h, 1, p.eta.df, p.eta.d2f);
  radial_fd_derivatives(p.dmu.f, p.h, 1, p.dmu.df, p.dmu.d2f);
  std::vector<double> sq(p.size()), cr(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    sq[i] = p.eta.f[i] * p.eta.f[i];
    cr[i] = p.eta.f[i] * p.dmu.f[i];
  }
  p.mass = 0.5 * radial_integral(p, sq);
  p.dmass = radial_integral(p, cr);
}

RadialProfile solve_local(const NonlinearitySpec& spec, double mu, int d, const ProfileOptions& opt) {
  RadialProfile p;
  p.mu = mu;
  p.dim = d;
  p.spec_name = spec.name();
  p.r_max = opt.r_max_scale / std::sqrt(mu);
  p.h = p.r_max / opt.points;
  p.r.resize(opt.points);
  for (int i = 0; i < opt.points; ++i) p.r[i] = i * p.h;
  RadialLaplacian L{opt.points, d, p.h};

  std::vector<double> guess =
      d == 1 ? shooting_guess(spec, mu, d, p.h, opt.points) : petviashvili_radial(spec, mu, L);
  auto polished = newton_polish(spec, mu, L, std::move(guess));
  auto eta = std::move(polished.eta);
  replace_tail(eta, p.h, d, mu, 1e-12 * eta[0]);
  const double res = sup_abs(local_residual(L, spec, mu, eta));
  if (!(res < opt.residual_tol * eta[0]))
    throw NumericalError(fmt::format("profile residual {:.3e} exceeds tolerance {:.1e} (mu={})", res,
                                     opt.residual_tol * eta[0], mu));
  check_shape(eta, true, "solve_profile");
  p.residual = res;
  p.eta.f = std::move(eta);
  p.dmu.f = mu_derivative(p, spec);
  std::vector<double> shift(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) shift[i] = mu - local_f1(spec, p.eta.f[i]);
  auto Au = L.apply(p.dmu.f);
  double mres = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) mres = std::max(mres, std::abs(Au[i] + shift[i] * p.dmu.f[i] + p.eta.f[i]));
  p.mu_residual = mres;
  fill_profile_common(p);
  return p;
}

// Dense Newton on the even half of a periodic grid for Hartree laws (d = 1).
RadialProfile solve_hartree(const NonlinearitySpec& spec, double mu, const ProfileOptions& opt) {
  const double r_max = opt.r_max_scale / std::sqrt(mu);
  const int n = 2048;
  auto grid = make_grid(1, n, r_max);
  const auto& What = spec.kernel_hat(grid);
  const auto k = grid->wavenumbers();
  const int half = n / 2;

  // Petviashvili in Fourier space.
  const double lam = spec.coupling() > 0.0 ? spec.coupling() : 1.0;
  std::vector<double> eta(n);
  for (int i = 0; i < n; ++i) eta[i] = std::sqrt(2.0 * mu / lam) / std::cosh(std::sqrt(mu) * grid->axis()[i]);
  auto field_of = [&](const std::vector<double>& v) {
    ComplexField f(grid);
    for (int i = 0; i < n; ++i) f[i] = v[i];
    return f;
  };
  double change = INFINITY;
  for (int it = 0; it < 3000 && change > 1e-12; ++it) {
    ComplexField e = field_of(eta);
    ComplexField fe = apply_nonlinearity(spec, e);
    auto eh = fft_forward(e);
    auto fh = fft_forward(fe);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += (k[i] * k[i] + mu) * std::norm(eh[i]);
      den += (std::conj(eh[i]) * fh[i]).real();
    }
    if (!(den > 0.0)) throw NumericalError("Hartree Petviashvili: stabilizing ratio undefined");
    const double S = std::pow(num / den, 1.5);
    for (int i = 0; i < n; ++i) fh[i] *= S / (k[i] * k[i] + mu);
    auto next = fft_inverse(grid, std::move(fh));
    change = 0.0;
    for (int i = 0; i < n; ++i) {
      change = std::max(change, std::abs(next[i].real() - eta[i]));
      eta[i] = next[i].real();
    }
    if (!(eta[half] > 0.0)) throw NumericalError("Hartree Petviashvili produced a non-positive iterate");
  }

  // Circulant stencils: -∂² and the kernel.
  std::vector<cplx> dk(n), ck(What.begin(), What.end());
  for (int i = 0; i < n; ++i) dk[i] = k[i] * k[i];
  fft_inverse_inplace(*grid, dk.data());
  fft_inverse_inplace(*grid, ck.data());
  auto circ = [&](const std::vector<cplx>& c, int i, int j) { return c[((i - j) % n + n) % n].real(); };

  auto residual = [&](const std::vector<double>& e) {
    ComplexField ef = field_of(e);
    auto lap = laplacian(ef);
    auto fe = apply_nonlinearity(spec, ef);
    std::vector<double> R(n);
    for (int i = 0; i < n; ++i) R[i] = -lap[i].real() + mu * e[i] - fe[i].real();
    return R;
  };

  const int m = half + 1;
  std::vector<double> Jf(static_cast<std::size_t>(m) * m);
  std::vector<lapack_int> piv(m);
  auto build_and_factor = [&](const std::vector<double>& e) {
    ComplexField ef = field_of(e);
    RealField U = nonlinear_multiplier(spec, ef);
    for (int a = 0; a < m; ++a) {
      const int i = half + a;
      for (int b = 0; b < m; ++b) {
        auto entry = [&](int j) {
          double v = circ(dk, i % n, j % n) - 2.0 * e[i % n] * circ(ck, i % n, j % n) * e[j % n];
          if (i % n == j % n) v += mu - U[i % n];
          return v;
        };
        const int j1 = (half + b) % n;
        double v = entry(j1);
        if (b != 0 && b != half) v += entry((half - b + n) % n);
        Jf[static_cast<std::size_t>(a) * m + b] = v;
      }
    }
    const auto info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, m, m, Jf.data(), m, piv.data());
    if (info != 0) throw NumericalError(fmt::format("Hartree Newton: Jacobian factorization failed (info={})", info));
  };
  auto solve_even = [&](const std::vector<double>& rhs_full) {
    std::vector<double> b(m);
    for (int a = 0; a < m; ++a) b[a] = rhs_full[(half + a) % n];
    LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', m, 1, Jf.data(), m, piv.data(), b.data(), 1);
    std::vector<double> out(n);
    for (int a = 0; a < m; ++a) {
      out[(half + a) % n] = b[a];
      out[(half - a + n) % n] = b[a];
    }
    return out;
  };

  double res = sup_abs(residual(eta));
  for (int it = 0; it < 6 && res > 1e-14 * eta[half]; ++it) {
    build_and_factor(eta);
    auto R = residual(eta);
    for (auto& x : R) x = -x;
    auto delta = solve_even(R);
    for (int i = 0; i < n; ++i) eta[i] += delta[i];
    res = sup_abs(residual(eta));
  }
  if (!(res < opt.residual_tol * eta[half]))
    throw NumericalError(fmt::format("Hartree profile residual {:.3e} exceeds tolerance (mu={})", res, mu));
  build_and_factor(eta);
  std::vector<double> minus_eta(n);
  for (int i = 0; i < n; ++i) minus_eta[i] = -eta[i];
  auto dmu = solve_even(minus_eta);

  // Spectral resampling to the radial grid.
  RadialProfile p;
  p.mu = mu;
  p.dim = 1;
  p.spec_name = spec.name();
  p.r_max = r_max;
  p.h = r_max / opt.points;
  p.residual = res;
  const int N = opt.points;
  p.r.resize(N);
  for (int i = 0; i < N; ++i) p.r[i] = i * p.h;
  auto fine_grid = make_grid(1, 2 * N, r_max);
  const auto kf = fine_grid->wavenumbers();
  auto resample = [&](const std::vector<double>& v, RadialSeries& out) {
    auto coarse = fft_forward(field_of(v));
    std::vector<cplx> padded(2 * N, 0.0);
    const double scale = static_cast<double>(2 * N) / n;
    for (int i = 0; i < n; ++i) {
      if (i == half) continue;
      const int mode = i < half ? i : i - n;
      padded[(mode + 2 * N) % (2 * N)] = coarse[i] * scale;
    }
    std::vector<cplx> d1(padded), d2(padded);
    for (int i = 0; i < 2 * N; ++i) {
      d1[i] *= cplx(0.0, kf[i]);
      d2[i] *= -kf[i] * kf[i];
    }
    fft_inverse_inplace(*fine_grid, padded.data());
    fft_inverse_inplace(*fine_grid, d1.data());
    fft_inverse_inplace(*fine_grid, d2.data());
    out.f.resize(N);
    out.df.resize(N);
    out.d2f.resize(N);
    for (int i = 0; i < N; ++i) {
      out.f[i] = padded[N + i].real();
      out.df[i] = d1[N + i].real();
      out.d2f[i] = d2[N + i].real();
    }
  };
  resample(eta, p.eta);
  resample(dmu, p.dmu);
  // Keep the far tail strictly positive.
  for (int i = 1; i < N; ++i) {
    if (p.eta.f[i] < 1e-12 * p.eta.f[0]) {
      const double base = std::max(p.eta.f[i - 1], 1e-300);
      for (int j = i; j < N; ++j) {
        p.eta.f[j] = base * std::exp(-std::sqrt(mu) * (j - i + 1) * p.h);
        p.eta.df[j] = -std::sqrt(mu) * p.eta.f[j];
        p.eta.d2f[j] = mu * p.eta.f[j];
      }
      break;
    }
  }
  check_shape(p.eta.f, false, "solve_profile (Hartree)");
  // Check A_{μ,0}∂_μη = -η on the periodic grid.
  {
    ComplexField u = field_of(dmu);
    auto lap = laplacian(u);
    auto lin = linearized_action(spec, real_part(field_of(eta)), u);
    double mres = 0.0;
    for (int i = 0; i < n; ++i) mres = std::max(mres, std::abs(-lap[i].real() + mu * dmu[i] - lin[i].real() + eta[i]));
    p.mu_residual = mres;
  }
  std::vector<double> sq(N), cr(N);
  for (int i = 0; i < N; ++i) {
    sq[i] = p.eta.f[i] * p.eta.f[i];
    cr[i] = p.eta.f[i] * p.dmu.f[i];
  }
  p.mass = 0.5 * radial_integral(p, sq);
  p.dmass = radial_integral(p, cr);
  return p;
}

// Quintic Hermite interpolation on [x_i, x_i + h] from (f, f', f'') at both ends.
// Returns the value (order 0), first or second derivative.
double hermite5(const RadialSeries& S, double h, double radius, int order) {
  const int n = static_cast<int>(S.f.size());
  const double x = radius / h;
  const int i = static_cast<int>(x);
  if (i >= n) return 0.0;
  const double t = x - i;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double f0 = S.f[i], f1 = i + 1 < n ? S.f[i + 1] : 0.0;
  const double p0 = S.df[i] * h, p1 = i + 1 < n ? S.df[i + 1] * h : 0.0;
  const double q0 = S.d2f[i] * h * h, q1 = i + 1 < n ? S.d2f[i + 1] * h * h : 0.0;
  double b[6];
  double scale = 1.0;
  if (order == 0) {
    b[0] = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    b[1] = 10 * t3 - 15 * t4 + 6 * t5;
    b[2] = t - 6 * t3 + 8 * t4 - 3 * t5;
    b[3] = -4 * t3 + 7 * t4 - 3 * t5;
    b[4] = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    b[5] = 0.5 * (t3 - 2 * t4 + t5);
  } else if (order == 1) {
    b[0] = -30 * t2 + 60 * t3 - 30 * t4;
    b[1] = -b[0];
    b[2] = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    b[3] = -12 * t2 + 28 * t3 - 15 * t4;
    b[4] = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
    b[5] = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    scale = 1.0 / h;
  } else {
    b[0] = -60 * t + 180 * t2 - 120 * t3;
    b[1] = -b[0];
    b[2] = -36 * t + 96 * t2 - 60 * t3;
    b[3] = -24 * t + 84 * t2 - 60 * t3;
    b[4] = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3);
    b[5] = 0.5 * (6 * t - 24 * t2 + 20 * t3);
    scale = 1.0 / (h * h);
  }
  return scale * (b[0] * f0 + b[1] * f1 + b[2] * p0 + b[3] * p1 + b[4] * q0 + b[5] * q1);
}

}  // namespace

void radial_fd_derivatives(const std::vector<double>& f, double h, int parity, std::vector<double>& df,
                           std::vector<double>& d2f) {
  const int n = static_cast<int>(f.size());
  df.resize(n);
  d2f.resize(n);
  for (int i = 0; i < n; ++i) {
    df[i] = fd1(f, i, h, parity);
    d2f[i] = fd2(f, i, h, parity);
  }
}

double radial_integral(int dim, double h, const std::vector<double>& g) {
  if (g.empty()) return 0.0;
  if (dim == 1) {
    double s = 0.5 * g[0];
    for (std::size_t i = 1; i < g.size(); ++i) s += g[i];
    return 2.0 * h * s;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) s += i * h * g[i];
  s *= h;
  // Endpoint corrections for the integrand r g(r) at r = 0.
  const double g2 = g.size() > 1 ? 2.0 * (g[1] - g[0]) / (h * h) : 0.0;
  s += h * h / 12.0 * g[0] - std::pow(h, 4) / 240.0 * g2;
  return 2.0 * M_PI * s;
}

double radial_integral(const RadialProfile& p, const std::vector<double>& g) { return radial_integral(p.dim, p.h, g); }

RadialProfile solve_profile(const NonlinearitySpec& spec, double mu, int d, const ProfileOptions& opt) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw UsageError(fmt::format("solve_profile: mu must be positive, got {}", mu));
  if (d != 1 && d != 2) throw UsageError(fmt::format("solve_profile: unsupported dimension {}", d));
  if (opt.points < 64) throw UsageError("solve_profile: too few radial points");
  if (spec.kind() == NonlinearitySpec::Kind::hartree) {
    if (d != 1) throw UsageError("solve_profile: Hartree profiles are implemented for d = 1 only");
    return solve_hartree(spec, mu, opt);
  }
  const auto cond = verify_conditions(spec, d);
  if (const auto* e = cond.find("existence"); e && !e->pass)
    throw CertificationError(fmt::format("solve_profile: existence prerequisite failed: {}", e->evidence));
  return solve_local(spec, mu, d, opt);
}

std::vector<double> mu_derivative(const RadialProfile& p, const NonlinearitySpec& spec) {
  if (!spec.is_local()) throw UsageError("mu_derivative: the radial linear solve applies to local laws");
  const int n = static_cast<int>(p.size());
  RadialLaplacian L{n, p.dim, p.h};
  std::vector<double> shift(n);
  for (int i = 0; i < n; ++i) shift[i] = p.mu - local_f1(spec, p.eta.f[i]);
  SpMat J = L.matrix(shift);
  Eigen::SparseLU<SpMat> lu;
  lu.compute(J);
  if (lu.info() != Eigen::Success) throw NumericalError("mu_derivative: factorization failed");
  const double lam = smallest_magnitude_eigenvalue(lu, n);
  if (lam < 1e-6)
    throw CertificationError(fmt::format("mu_derivative: A_(mu,0) is near-singular (|lambda| ~ {:.3e})", lam));
  Vec rhs = -Eigen::Map<const Vec>(p.eta.f.data(), n);
  Vec u = lu.solve(rhs);
  return std::vector<double>(u.data(), u.data() + n);
}

std::vector<double> power_mu_derivative(const RadialProfile& p, double s) {
  std::vector<double> out(p.size());
  std::vector<double> d1 = p.eta.df;
  if (d1.empty()) {
    std::vector<double> d2;
    radial_fd_derivatives(p.eta.f, p.h, 1, d1, d2);
  }
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = 0.5 / p.mu * (p.eta.f[i] / s + p.r[i] * d1[i]);
  return out;
}

double shooting_eta0(const NonlinearitySpec& spec, double mu, int d, double step) {
  if (!spec.is_local()) throw UsageError("shooting_eta0: local laws only");
  const double r_end = 40.0 / std::sqrt(mu);
  const auto [lo, hi] = shooting_bracket(spec, mu, d, step, r_end);
  return 0.5 * (lo + hi);
}

RadialProfile::Sample RadialProfile::eval(double radius) const {
  Sample s;
  radius = std::abs(radius);
  s.eta = hermite5(eta, h, radius, 0);
  s.deta = hermite5(eta, h, radius, 1);
  s.d2eta = hermite5(eta, h, radius, 2);
  if (!dmu.empty()) {
    s.dmu = hermite5(dmu, h, radius, 0);
    s.ddmu = hermite5(dmu, h, radius, 1);
  }
  if (!dmu2.empty()) s.dmu2 = hermite5(dmu2, h, radius, 0);
  return s;
}

double RadialProfile::interpolate(const RadialSeries& S, double radius) const {
  return hermite5(S, h, std::abs(radius), 0);
}

double RadialProfile::interpolate_derivative(const RadialSeries& S, double radius) const {
  const double sign = radius < 0.0 ? -1.0 : 1.0;
  return sign * hermite5(S, h, std::abs(radius), 1);
}

MassCurve mass_curve(const NonlinearitySpec& spec, const std::vector<double>& mus, int d, const ProfileOptions& opt) {
  MassCurve c;
  for (double mu : mus) {
    const auto p = solve_profile(spec, mu, d, opt);
    c.mu.push_back(mu);
    c.m.push_back(p.mass);
    c.dm.push_back(p.dmass);
    if (!(p.dmass > 0.0)) c.stable = false;
  }
  return c;
}

std::string profile_table(const RadialProfile& p) {
  std::ostringstream os;
  os << fmt::format("# spec: {}\n# d: {}\n# mu: {:.17g}\n# residual: {:.6e}\n# mass: {:.17g}\n# dmass: {:.17g}\n",
                    p.spec_name, p.dim, p.mu, p.residual, p.mass, p.dmass);
  os << "# r eta deta dmu_eta\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    os << fmt::format("{:.17g} {:.17g} {:.17g} {:.17g}\n", p.r[i], p.eta.f[i], p.eta.df[i], p.dmu.f[i]);
  return os.str();
}

void write_profile_table(const RadialProfile& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError(fmt::format("cannot open '{}' for writing", path));
  out << profile_table(p);
}

}  // namespace nlsdyn
