#include "nlsdyn/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>
#include <fmt/format.h>
#include <lapacke.h>

#include "nlsdyn/error.hpp"
#include "nlsdyn/spectral.hpp"

namespace nlsdyn {
namespace {

double lambda_k(int d, int k) { return d == 1 ? 0.0 : static_cast<double>(k) * (d - 2 + k); }

double block_coefficient(const NonlinearitySpec& spec, int block, double eta) {
  const double p = eta * eta;
  const double f2 = spec.h(p);
  return block == 1 ? f2 + 2.0 * spec.dh(p) * p : f2;
}

// Assembles the symmetrized tridiagonal for potential `pot` (already including λ_k/r²).
void assemble_tridiagonal(int d, int sector, double h, const std::vector<double>& r, const std::vector<double>& w,
                          const std::vector<double>& pot, double shift, std::vector<double>& diag,
                          std::vector<double>& off) {
  const int n = static_cast<int>(r.size());
  diag.assign(n, 0.0);
  off.assign(n > 0 ? n - 1 : 0, 0.0);
  const double h2 = h * h;
  auto face = [&](int i) {  // weight at r_{i+1/2}
    return d == 1 ? 1.0 : std::pow((i + 1) * h, d - 1);
  };
  for (int i = 0; i < n; ++i) {
    double k = 0.0;
    // Right face.
    const double fr = face(i);
    k += (i == n - 1 ? 2.0 * fr : fr) / h2;
    // Left face.
    if (i > 0) {
      k += face(i - 1) / h2;
    } else if (d == 1 && sector % 2 == 1) {
      k += 2.0 / h2;
    }
    k += w[i] * (pot[i] + shift);
    diag[i] = k / w[i];
    if (i + 1 < n) off[i] = -fr / h2 / std::sqrt(w[i] * w[i + 1]);
  }
}

RadialOperator build_radial(const RadialProfile& p, const NonlinearitySpec& spec, int block, int sector, int n) {
  RadialOperator op;
  op.block = block;
  op.sector = sector;
  op.dim = p.dim;
  op.mu = p.mu;
  op.multiplicity = (p.dim == 2 && sector >= 1) ? 2 : 1;
  op.lambda_k = lambda_k(p.dim, sector);
  op.h = p.r_max / n;
  op.r.resize(n);
  op.weight.resize(n);
  op.potential.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * op.h;
    op.r[i] = r;
    op.weight[i] = p.dim == 1 ? 1.0 : std::pow(r, p.dim - 1);
    op.potential[i] = op.lambda_k / (r * r) - block_coefficient(spec, block, p.interpolate(p.eta, r));
  }
  assemble_tridiagonal(p.dim, sector, op.h, op.r, op.weight, op.potential, p.mu, op.diag, op.off);
  return op;
}

int sector_count(int d, int k_max) { return d == 1 ? 2 : k_max + 1; }

Eigen::MatrixXd circulant(const std::vector<cplx>& c, int n) {
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = c[((i - j) % n + n) % n].real();
  return M;
}

// -∂² and the kernel convolution as dense circulants on a periodic grid.
Eigen::MatrixXd second_derivative_matrix(const GridPtr& g) {
  const int n = g->n();
  const auto k = g->wavenumbers();
  std::vector<cplx> c(n);
  for (int i = 0; i < n; ++i) c[i] = k[i] * k[i];
  fft_inverse_inplace(*g, c.data());
  return circulant(c, n);
}

std::vector<double> sample_profile(const RadialProfile& p, const GridPtr& g) {
  std::vector<double> e(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto x = g->point(i);
    e[i] = p.interpolate(p.eta, std::hypot(x[0], x[1]));
  }
  return e;
}

FullGridOperator build_full(const RadialProfile& p, const NonlinearitySpec& spec, int block, int n) {
  if (p.dim != 1) throw UsageError("full-grid operators are implemented for d = 1");
  FullGridOperator op;
  op.block = block;
  op.grid = make_grid(1, n, p.r_max);
  const auto eta = sample_profile(p, op.grid);
  Eigen::MatrixXd M = second_derivative_matrix(op.grid);
  if (spec.is_local()) {
    for (int i = 0; i < n; ++i) M(i, i) += p.mu - block_coefficient(spec, block, eta[i]);
  } else {
    const auto& What = spec.kernel_hat(op.grid);
    std::vector<cplx> c(What.begin(), What.end());
    fft_inverse_inplace(*op.grid, c.data());
    const Eigen::MatrixXd C = circulant(c, n);
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(eta.data(), n);
    Eigen::VectorXd U = C * e.cwiseProduct(e);
    for (int i = 0; i < n; ++i) M(i, i) += p.mu - U[i];
    if (block == 1) M -= 2.0 * e.asDiagonal() * C * e.asDiagonal();
  }
  op.matrix = 0.5 * (M + M.transpose());
  return op;
}

// Lowest `count` eigenpairs of a dense symmetric matrix.
TridiagEigen dense_lowest(const Eigen::MatrixXd& A, int count) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd a = A;
  TridiagEigen out;
  out.values.resize(n);
  out.vectors.resize(n, count);
  std::vector<lapack_int> isuppz(2 * count);
  lapack_int found = 0;
  const auto info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, 1, count, 0.0, &found,
                                   out.values.data(), out.vectors.data(), n, isuppz.data());
  if (info != 0) throw NumericalError(fmt::format("dense eigensolver failed (info={})", info));
  out.values.resize(found);
  return out;
}

// Lowest generalized eigenvalue of A x = ρ B x on the orthogonal complement of span(C).
double constrained_min(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd a, b;
  int m = 0;
  if (C.cols() > 0) {
    m = static_cast<int>(C.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(C);
    const auto Q = qr.householderQ();
    Eigen::MatrixXd ta = A, tb = B;
    ta.applyOnTheLeft(Q.transpose());
    ta.applyOnTheRight(Q);
    tb.applyOnTheLeft(Q.transpose());
    tb.applyOnTheRight(Q);
    a = ta.bottomRightCorner(n - m, n - m);
    b = tb.bottomRightCorner(n - m, n - m);
  } else {
    a = A;
    b = B;
  }
  const int k = n - m;
  a = 0.5 * (a + a.transpose()).eval();
  b = 0.5 * (b + b.transpose()).eval();
  std::vector<double> w(k);
  std::vector<lapack_int> ifail(k);
  lapack_int found = 0;
  double z = 0.0;
  const auto info = LAPACKE_dsygvx(LAPACK_COL_MAJOR, 1, 'N', 'I', 'U', k, a.data(), k, b.data(), k, 0.0, 0.0, 1, 1,
                                   0.0, &found, w.data(), &z, 1, ifail.data());
  if (info != 0 || found < 1) throw NumericalError(fmt::format("generalized eigensolver failed (info={})", info));
  return w[0];
}

Eigen::MatrixXd tridiagonal_dense(const std::vector<double>& d, const std::vector<double>& e) {
  const int n = static_cast<int>(d.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, i) = d[i];
    if (i + 1 < n) {
      M(i, i + 1) = e[i];
      M(i + 1, i) = e[i];
    }
  }
  return M;
}

double overlap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

// Solves the symmetric tridiagonal system S v = rhs.
std::vector<double> tridiagonal_solve(const std::vector<double>& d, const std::vector<double>& e,
                                      const std::vector<double>& rhs) {
  const int n = static_cast<int>(d.size());
  std::vector<double> dl(e), du(e), dd(d), b(rhs);
  const auto info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), dd.data(), du.data(), b.data(), n);
  if (info != 0) throw NumericalError(fmt::format("tridiagonal solve failed (info={})", info));
  return b;
}

double relative_norm(const ComplexField& res, const ComplexField& scale) {
  const double s = l2_norm(scale);
  return s > 0.0 ? l2_norm(res) / s : l2_norm(res);
}

ComplexField helmholtz(const ComplexField& w, double mu) {
  ComplexField out = laplacian(w);
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = -out[i] + mu * w[i];
  return out;
}

}  // namespace

void RadialOperator::gram(double shift, std::vector<double>& gdiag, std::vector<double>& goff) const {
  std::vector<double> pot(size());
  for (std::size_t i = 0; i < size(); ++i) pot[i] = lambda_k / (r[i] * r[i]);
  assemble_tridiagonal(dim, sector, h, r, weight, pot, shift, gdiag, goff);
}

const RadialOperator& OperatorSet::radial_op(int block, int sector) const {
  for (const auto& op : radial)
    if (op.block == block && op.sector == sector) return op;
  throw UsageError(fmt::format("no radial operator for block {} sector {}", block, sector));
}

const FullGridOperator& OperatorSet::full_op(int block) const {
  for (const auto& op : full)
    if (op.block == block) return op;
  throw UsageError(fmt::format("no full-grid operator for block {}", block));
}

OperatorSet assemble_operators(const RadialProfile& profile, const NonlinearitySpec& spec, int k_max,
                               const AssemblyOptions& opt) {
  if (k_max > 8) throw UsageError(fmt::format("k_max={} exceeds the supported maximum of 8", k_max));
  if (k_max < 1) throw UsageError("k_max must be at least 1");
  if (profile.eta.empty()) throw UsageError("assemble_operators: empty profile");
  OperatorSet ops;
  ops.mu = profile.mu;
  ops.dim = profile.dim;
  ops.k_max = k_max;
  ops.spec = spec;
  ops.options = opt;
  if (spec.is_local()) {
    for (int block = 1; block <= 2; ++block)
      for (int k = 0; k < sector_count(profile.dim, k_max); ++k)
        ops.radial.push_back(build_radial(profile, spec, block, k, opt.radial_points));
  }
  if (!spec.is_local() || (opt.include_full && profile.dim == 1)) {
    for (int block = 1; block <= 2; ++block) ops.full.push_back(build_full(profile, spec, block, opt.full_points));
  }
  return ops;
}

TridiagEigen tridiagonal_lowest(const std::vector<double>& diag, const std::vector<double>& off, int count,
                                bool vectors) {
  const int n = static_cast<int>(diag.size());
  count = std::min(count, n);
  std::vector<double> d(diag), e(off);
  e.resize(std::max(n, 1));
  TridiagEigen out;
  out.values.resize(n);
  if (vectors) out.vectors.resize(n, count);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  double dummy = 0.0;
  const auto info =
      LAPACKE_dstevx(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count, 0.0,
                     &found, out.values.data(), vectors ? out.vectors.data() : &dummy, vectors ? n : 1, ifail.data());
  if (info != 0) throw NumericalError(fmt::format("tridiagonal eigensolver did not converge (info={})", info));
  out.values.resize(found);
  return out;
}

GridPtr certification_grid(const RadialProfile& profile) {
  if (profile.dim == 1) return make_grid(1, 4096, profile.r_max);
  return make_grid(2, 512, 25.0 / std::sqrt(profile.mu));
}

ComplexField apply_linearized(const NonlinearitySpec& spec, const RealField& eta, double mu, const ComplexField& w) {
  ComplexField out = helmholtz(w, mu);
  out -= linearized_action(spec, eta, w);
  return out;
}

SymplecticMatrix omega_matrix(const TangentFrame& frame, const RadialProfile& profile) {
  if (std::abs(profile.dmass) < 1e-6)
    throw CertificationError(fmt::format("degenerate symplectic form: |m'(mu)| = {:.3e} < 1e-6", std::abs(profile.dmass)));
  const int n = static_cast<int>(frame.count());
  SymplecticMatrix s;
  s.m = profile.mass;
  s.dm = profile.dmass;
  s.omega_inv.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) s.omega_inv(j, k) = symplectic(frame.z[j], frame.z[k]);
  s.antisymmetry_error = (s.omega_inv + s.omega_inv.transpose()).cwiseAbs().maxCoeff();
  s.omega = s.omega_inv.fullPivLu().inverse();
  s.inverse_error = (s.omega * s.omega_inv - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  return s;
}

SpectralReport spectral_report(const OperatorSet& ops, const RadialProfile& profile) {
  SpectralReport rep;
  rep.mu = ops.mu;
  rep.dim = ops.dim;
  const double tol = 1e-5 * ops.mu;
  const int d = ops.dim;
  const auto& spec = ops.spec;
  std::vector<double> all1, all2;
  std::string detail;
  bool ok = true;

  if (!ops.radial.empty()) {
    // Coarse copies for Richardson extrapolation.
    const int n_fine = static_cast<int>(ops.radial.front().size());
    const int n_coarse = n_fine / 2;
    std::vector<double> near_zero_L1, near_zero_L2;
    for (const auto& op : ops.radial) {
      const auto fine = tridiagonal_lowest(op.diag, op.off, 6, true);
      const auto coarse_op = build_radial(profile, spec, op.block, op.sector, n_coarse);
      const auto coarse = tridiagonal_lowest(coarse_op.diag, coarse_op.off, 6, false);
      SectorSpectrum ss;
      ss.block = op.block;
      ss.sector = op.sector;
      ss.multiplicity = op.multiplicity;
      for (std::size_t i = 0; i < fine.values.size(); ++i) {
        const double v = i < coarse.values.size() ? (4.0 * fine.values[i] - coarse.values[i]) / 3.0 : fine.values[i];
        ss.values.push_back(v);
        for (int m = 0; m < op.multiplicity; ++m) (op.block == 1 ? all1 : all2).push_back(v);
      }
      if (op.block == 1 && op.sector < 9) rep.sector_min[op.sector] = ss.values.front();

      // Zero modes: translation in L₁ sector 1, gauge in L₂ sector 0.
      Eigen::VectorXd mode(op.size());
      if (op.block == 1 && op.sector == 1) {
        for (std::size_t i = 0; i < op.size(); ++i)
          mode[i] = std::sqrt(op.weight[i]) * profile.interpolate_derivative(profile.eta, op.r[i]);
        rep.zero_eigenvalue_L1 = ss.values.front();
        rep.zero_overlap_L1 = overlap(fine.vectors.col(0), mode);
      }
      if (op.block == 2 && op.sector == 0) {
        for (std::size_t i = 0; i < op.size(); ++i) mode[i] = std::sqrt(op.weight[i]) * profile.interpolate(profile.eta, op.r[i]);
        rep.zero_eigenvalue_L2 = ss.values.front();
        rep.zero_overlap_L2 = overlap(fine.vectors.col(0), mode);
      }
      for (std::size_t i = 0; i < ss.values.size(); ++i) {
        const bool expected = i == 0 && ((op.block == 1 && op.sector == 1) || (op.block == 2 && op.sector == 0));
        if (std::abs(ss.values[i]) < tol && !expected) {
          ok = false;
          detail += fmt::format("unexpected zero eigenvalue {:.3e} in L{} sector {}; ", ss.values[i], op.block, op.sector);
        }
      }
      rep.sectors.push_back(std::move(ss));
    }
    // <η, L₁⁻¹η> in the even sector, extrapolated.
    auto dual = [&](const RadialOperator& op) {
      std::vector<double> rhs(op.size());
      for (std::size_t i = 0; i < op.size(); ++i) rhs[i] = std::sqrt(op.weight[i]) * profile.interpolate(profile.eta, op.r[i]);
      const auto v = tridiagonal_solve(op.diag, op.off, rhs);
      double s = 0.0;
      for (std::size_t i = 0; i < op.size(); ++i) s += rhs[i] * v[i];
      return s * op.h * (d == 1 ? 2.0 : 2.0 * M_PI);
    };
    const auto& l1e = ops.radial_op(1, 0);
    const double fine_dual = dual(l1e);
    const double coarse_dual = dual(build_radial(profile, spec, 1, 0, n_coarse));
    rep.eta_L1inv_eta = (4.0 * fine_dual - coarse_dual) / 3.0;
  } else {
    const auto& op1 = ops.full_op(1);
    const auto& op2 = ops.full_op(2);
    const auto e1 = dense_lowest(op1.matrix, 6);
    const auto e2 = dense_lowest(op2.matrix, 6);
    all1 = e1.values;
    all2 = e2.values;
    const auto eta = sample_profile(profile, op1.grid);
    const int n = op1.grid->n();
    Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(eta.data(), n);
    Eigen::VectorXd dv(n);
    for (int i = 0; i < n; ++i) dv[i] = profile.interpolate_derivative(profile.eta, op1.grid->axis()[i]);
    // Pick the eigenvalue closest to zero in each block.
    auto closest = [](const std::vector<double>& v) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) < std::abs(v[best])) best = i;
      return best;
    };
    const auto z1 = closest(e1.values), z2 = closest(e2.values);
    rep.zero_eigenvalue_L1 = e1.values[z1];
    rep.zero_overlap_L1 = overlap(e1.vectors.col(z1), dv);
    rep.zero_eigenvalue_L2 = e2.values[z2];
    rep.zero_overlap_L2 = overlap(e2.vectors.col(z2), ev);
    for (std::size_t i = 0; i < e1.values.size(); ++i)
      if (i != z1 && std::abs(e1.values[i]) < tol) {
        ok = false;
        detail += fmt::format("unexpected zero eigenvalue {:.3e} in L1; ", e1.values[i]);
      }
    for (std::size_t i = 0; i < e2.values.size(); ++i)
      if (i != z2 && std::abs(e2.values[i]) < tol) {
        ok = false;
        detail += fmt::format("unexpected zero eigenvalue {:.3e} in L2; ", e2.values[i]);
      }
    rep.sectors.push_back({1, -1, 1, e1.values});
    rep.sectors.push_back({2, -1, 1, e2.values});
    Eigen::VectorXd u = op1.matrix.ldlt().solve(ev);
    rep.eta_L1inv_eta = ev.dot(u) * op1.grid->spacing();
  }

  std::sort(all1.begin(), all1.end());
  std::sort(all2.begin(), all2.end());
  for (double v : all1) rep.negative_L1 += v < -tol ? 1 : 0;
  for (double v : all2) rep.negative_L2 += v < -tol ? 1 : 0;
  rep.lowest_L1.assign(all1.begin(), all1.begin() + std::min<std::size_t>(6, all1.size()));
  rep.lowest_L2.assign(all2.begin(), all2.begin() + std::min<std::size_t>(6, all2.size()));

  if (!(std::abs(rep.zero_eigenvalue_L1) < tol && rep.zero_overlap_L1 > 0.999)) {
    ok = false;
    detail += fmt::format("translation mode: eigenvalue {:.3e}, overlap {:.6f}; ", rep.zero_eigenvalue_L1,
                          rep.zero_overlap_L1);
  }
  if (!(std::abs(rep.zero_eigenvalue_L2) < tol && rep.zero_overlap_L2 > 0.999)) {
    ok = false;
    detail += fmt::format("gauge mode: eigenvalue {:.3e}, overlap {:.6f}; ", rep.zero_eigenvalue_L2, rep.zero_overlap_L2);
  }

  // Residuals of the zero-mode algebra on a Cartesian grid.
  const auto grid = certification_grid(profile);
  const SolitonParams rest{{0.0, 0.0}, {0.0, 0.0}, 0.0, profile.mu};
  const auto frame = tangent_frame(profile, rest, grid);
  const RealField eta = real_part(synthesize(profile, rest, grid));
  auto Lz = [&](const ComplexField& z) { return apply_linearized(spec, eta, profile.mu, z); };
  const cplx I(0.0, 1.0);
  double tr = 0.0, br = 0.0, nl1 = 0.0;
  for (int j = 0; j < d; ++j) {
    const auto lt = Lz(frame.translation(j));
    tr = std::max(tr, relative_norm(lt, helmholtz(frame.translation(j), profile.mu)));
    nl1 = std::max(nl1, relative_norm(lt, frame.translation(j)));
    ComplexField lb = Lz(frame.boost(j));
    lb -= 2.0 * I * frame.translation(j);
    br = std::max(br, relative_norm(lb, helmholtz(frame.boost(j), profile.mu)));
  }
  const auto lg = Lz(frame.gauge());
  ComplexField ls = Lz(frame.scaling());
  ls -= I * frame.gauge();
  rep.algebra_residual[0] = tr;
  rep.algebra_residual[1] = relative_norm(lg, helmholtz(frame.gauge(), profile.mu));
  rep.algebra_residual[2] = br;
  rep.algebra_residual[3] = relative_norm(ls, helmholtz(frame.scaling(), profile.mu));
  rep.null_residual_L1 = nl1;
  rep.null_residual_L2 = relative_norm(lg, frame.gauge());

  if (d == 2) {
    for (int k = 2; k <= ops.k_max && k < 9; ++k) {
      if (!(rep.sector_min[k] > rep.sector_min[k - 1])) {
        ok = false;
        detail += fmt::format("sector minima not increasing at k={}; ", k);
      }
    }
  }
  if (rep.negative_L1 != 1) {
    ok = false;
    detail += fmt::format("L1 has {} negative eigenvalues; ", rep.negative_L1);
  }
  if (rep.negative_L2 != 0) {
    ok = false;
    detail += fmt::format("L2 has {} negative eigenvalues; ", rep.negative_L2);
  }
  rep.condition_F = ok;
  rep.condition_F_detail = ok ? "null spaces are spanned by the symmetry modes" : detail;
  return rep;
}

CoercivityResult coercivity(const OperatorSet& ops, const RadialProfile& profile, const CoercivityOptions& opt) {
  const auto& spec = ops.spec;
  auto evaluate = [&](int n, double& unconstrained) {
    double rho = INFINITY;
    unconstrained = INFINITY;
    if (spec.is_local()) {
      for (int block = 1; block <= 2; ++block) {
        for (int k = 0; k < sector_count(ops.dim, ops.k_max); ++k) {
          const auto op = build_radial(profile, spec, block, k, n);
          std::vector<double> gd, ge;
          op.gram(1.0, gd, ge);
          const Eigen::MatrixXd A = tridiagonal_dense(op.diag, op.off);
          const Eigen::MatrixXd B = tridiagonal_dense(gd, ge);
          Eigen::MatrixXd C(n, 0);
          if (k <= 1) {
            C.resize(n, 1);
            for (int i = 0; i < n; ++i) {
              const double r = op.r[i];
              const double sw = std::sqrt(op.weight[i]);
              double c = 0.0;
              if (block == 1 && k == 0) c = profile.interpolate(profile.eta, r);
              if (block == 1 && k == 1) c = r * profile.interpolate(profile.eta, r);
              if (block == 2 && k == 0) c = profile.interpolate(profile.dmu, r);
              if (block == 2 && k == 1) c = profile.interpolate_derivative(profile.eta, r);
              C(i, 0) = sw * c;
            }
          }
          rho = std::min(rho, constrained_min(A, B, C));
          unconstrained = std::min(unconstrained, constrained_min(A, B, Eigen::MatrixXd(n, 0)));
        }
      }
      return rho;
    }
    // Hartree: dense blocks on the periodic grid.
    for (int block = 1; block <= 2; ++block) {
      const auto op = build_full(profile, spec, block, n);
      Eigen::MatrixXd B = second_derivative_matrix(op.grid);
      B += Eigen::MatrixXd::Identity(n, n);
      Eigen::MatrixXd C(n, 2);
      for (int i = 0; i < n; ++i) {
        const double x = op.grid->axis()[i];
        if (block == 1) {
          C(i, 0) = profile.interpolate(profile.eta, x);
          C(i, 1) = x * profile.interpolate(profile.eta, x);
        } else {
          C(i, 0) = profile.interpolate_derivative(profile.eta, x);
          C(i, 1) = profile.interpolate(profile.dmu, x);
        }
      }
      rho = std::min(rho, constrained_min(op.matrix, B, C));
      unconstrained = std::min(unconstrained, constrained_min(op.matrix, B, Eigen::MatrixXd(n, 0)));
    }
    return rho;
  };
  CoercivityResult res;
  res.points = opt.points;
  double unc = 0.0, unc2 = 0.0;
  res.rho = evaluate(opt.points, unc);
  res.unconstrained = unc;
  res.rho_refined = res.rho;
  if (opt.refine) {
    res.rho_refined = evaluate(2 * opt.points, unc2);
    res.refinement_change = std::abs(res.rho_refined - res.rho) / std::max(std::abs(res.rho_refined), 1e-300);
  }
  if (!(res.rho > 0.0))
    throw CertificationError(fmt::format("coercivity failed: rho = {:.6g} (unconstrained minimum {:.6g})", res.rho, unc));
  return res;
}

SpectralReport certify(const RadialProfile& profile, const NonlinearitySpec& spec, const CertifyOptions& opt) {
  const auto ops = assemble_operators(profile, spec, profile.dim == 1 ? 1 : opt.k_max, opt.assembly);
  auto rep = spectral_report(ops, profile);
  const auto grid = certification_grid(profile);
  const SolitonParams rest{{0.0, 0.0}, {0.0, 0.0}, 0.0, profile.mu};
  try {
    rep.omega = omega_matrix(tangent_frame(profile, rest, grid), profile);
  } catch (const CertificationError& e) {
    rep.omega_error = e.what();
  }
  if (!rep.condition_F) {
    rep.rho_error = "condition F failed";
  } else if (!rep.omega) {
    rep.rho_error = "skipped: " + rep.omega_error;
  } else {
    try {
      const auto c = coercivity(ops, profile, opt.coercivity);
      rep.rho = c.rho;
      rep.rho_refined = c.rho_refined;
      rep.rho_unconstrained = c.unconstrained;
    } catch (const CertificationError& e) {
      rep.rho_error = e.what();
    }
  }
  return rep;
}

std::string SpectralReport::to_text() const {
  std::ostringstream os;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += fmt::format("{}{:.10g}", i ? " " : "", v[i]);
    return s;
  };
  os << fmt::format("mu: {:.17g}\n", mu);
  os << fmt::format("dimension: {}\n", dim);
  os << fmt::format("negative_L1: {}\n", negative_L1);
  os << fmt::format("negative_L2: {}\n", negative_L2);
  os << fmt::format("lowest_L1: {}\n", list(lowest_L1));
  os << fmt::format("lowest_L2: {}\n", list(lowest_L2));
  for (const auto& s : sectors)
    os << fmt::format("sector_L{}_k{}: multiplicity={} values={}\n", s.block, s.sector, s.multiplicity, list(s.values));
  os << fmt::format("zero_eigenvalue_L1: {:.6e}\n", zero_eigenvalue_L1);
  os << fmt::format("zero_overlap_L1: {:.12f}\n", zero_overlap_L1);
  os << fmt::format("zero_eigenvalue_L2: {:.6e}\n", zero_eigenvalue_L2);
  os << fmt::format("zero_overlap_L2: {:.12f}\n", zero_overlap_L2);
  os << fmt::format("null_residual_L1: {:.6e}\n", null_residual_L1);
  os << fmt::format("null_residual_L2: {:.6e}\n", null_residual_L2);
  os << fmt::format("algebra_residual_translation: {:.6e}\n", algebra_residual[0]);
  os << fmt::format("algebra_residual_gauge: {:.6e}\n", algebra_residual[1]);
  os << fmt::format("algebra_residual_boost: {:.6e}\n", algebra_residual[2]);
  os << fmt::format("algebra_residual_scaling: {:.6e}\n", algebra_residual[3]);
  os << fmt::format("eta_L1inv_eta: {:.12g}\n", eta_L1inv_eta);
  os << fmt::format("condition_F: {}\n", condition_F ? "PASS" : "FAIL");
  os << fmt::format("condition_F_detail: {}\n", condition_F_detail);
  if (omega) {
    os << fmt::format("mass_m: {:.17g}\n", omega->m);
    os << fmt::format("mass_dm: {:.17g}\n", omega->dm);
    for (int j = 0; j < omega->omega_inv.rows(); ++j) {
      std::vector<double> row(omega->omega_inv.cols());
      for (int k = 0; k < omega->omega_inv.cols(); ++k) row[k] = omega->omega_inv(j, k);
      os << fmt::format("omega_inv_row{}: {}\n", j, list(row));
    }
  }
  if (!omega_error.empty()) os << fmt::format("omega_error: {}\n", omega_error);
  if (!rho_error.empty()) os << fmt::format("rho_error: {}\n", rho_error);
  if (rho) {
    os << fmt::format("rho: {:.12g}\n", *rho);
    os << fmt::format("rho_refined: {:.12g}\n", rho_refined);
    os << fmt::format("rho_unconstrained: {:.12g}\n", rho_unconstrained);
  }
  return os.str();
}

}  // namespace nlsdyn
