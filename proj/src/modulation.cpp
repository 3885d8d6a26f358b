#include "nlsdyn/modulation.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <fmt/format.h>

#include "nlsdyn/effective.hpp"
#include "nlsdyn/spectral.hpp"

namespace nlsdyn {
namespace {

SolitonParams at_rest(double mu) { return {{0.0, 0.0}, {0.0, 0.0}, 0.0, mu}; }

struct Evaluation {
  std::shared_ptr<const RadialProfile> profile;
  ComplexField eta;
  ComplexField w;
  TangentFrame frame;
  std::vector<double> G;
  double residual = 0.0;
};

Evaluation evaluate(const ComplexField& psi, const SolitonParams& sigma, const ProfileFamily& family) {
  Evaluation e;
  e.profile = family.at(sigma.mu);
  const auto& grid = psi.grid_ptr();
  check_guard(*grid, sigma, "decompose");
  const auto rest = at_rest(sigma.mu);
  e.eta = synthesize(*e.profile, rest, grid);
  e.w = frame_transform(psi, sigma);
  e.w -= e.eta;
  e.frame = tangent_frame(*e.profile, rest, grid);
  e.G.resize(e.frame.count());
  for (std::size_t j = 0; j < e.frame.count(); ++j) {
    e.G[j] = symplectic(e.w, e.frame.z[j]);
    e.residual = std::max(e.residual, std::abs(e.G[j]));
  }
  return e;
}

SolitonParams apply_update(const SolitonParams& s, const Eigen::VectorXd& delta, int d, double step) {
  SolitonParams out = s;
  double va = 0.0;
  for (int j = 0; j < d; ++j) {
    out.a[j] += step * delta[j];
    out.v[j] += step * delta[d + j];
    va += s.v[j] * step * delta[j];
  }
  out.gamma += step * delta[2 * d] + 0.5 * va;
  out.mu += step * delta[2 * d + 1];
  return out;
}

}  // namespace

std::vector<double> constraint_values(const ComplexField& psi, const SolitonParams& sigma, const RadialProfile& profile) {
  const auto rest = at_rest(sigma.mu);
  ComplexField w = frame_transform(psi, sigma);
  w -= synthesize(profile, rest, psi.grid_ptr());
  const auto frame = tangent_frame(profile, rest, psi.grid_ptr());
  std::vector<double> G(frame.count());
  for (std::size_t j = 0; j < frame.count(); ++j) G[j] = symplectic(w, frame.z[j]);
  return G;
}

ComplexField project_skew_orthogonal(const ComplexField& q, const TangentFrame& frame) {
  // q - Σ c_k z_k with ω(q - Σ c_k z_k, z_j) = 0.
  const int n = static_cast<int>(frame.count());
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd b(n);
  for (int j = 0; j < n; ++j) {
    b[j] = symplectic(q, frame.z[j]);
    for (int k = 0; k < n; ++k) M(j, k) = symplectic(frame.z[k], frame.z[j]);
  }
  const Eigen::VectorXd c = M.fullPivLu().solve(b);
  ComplexField out = q;
  for (int k = 0; k < n; ++k)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c[k] * frame.z[k][i];
  return out;
}

ModulationState decompose(const ComplexField& psi, const SolitonParams& guess, const ProfileFamily& family,
                          const DecomposeOptions& opt) {
  if (!psi.all_finite()) throw NumericalError("decompose: non-finite field");
  const int d = psi.grid().dim();
  SolitonParams sigma = guess;
  if (d == 1) sigma.a[1] = sigma.v[1] = 0.0;
  Evaluation cur = evaluate(psi, sigma, family);
  const double eta_l2 = l2_norm(cur.eta);
  const double eta_h1 = h1_norm(cur.eta);
  const double start = h1_norm(cur.w);
  if (!(start < opt.trust_fraction * eta_h1))
    throw NumericalError(fmt::format("decompose: ||psi - eta_sigma||_H1 = {:.6g} outside the trust region ({:.6g})",
                                     start, opt.trust_fraction * eta_h1));
  const double tol = opt.tolerance * eta_l2;
  ModulationState st;
  st.residual_history.push_back(cur.residual);
  const int n = 2 * d + 2;
  for (int it = 0; cur.residual >= tol; ++it) {
    if (it >= opt.max_iterations) {
      std::string hist;
      for (double r : st.residual_history) hist += fmt::format(" {:.3e}", r);
      throw NumericalError(fmt::format("decompose: no convergence in {} iterations; residual history:{}",
                                       opt.max_iterations, hist));
    }
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd G(n);
    for (int j = 0; j < n; ++j) {
      G[j] = cur.G[j];
      for (int k = 0; k < n; ++k) {
        const double c = (k >= d && k < 2 * d) ? 0.5 : 1.0;
        J(j, k) = symplectic(cur.frame.z[k], cur.frame.z[j]) * c;
      }
    }
    const Eigen::VectorXd delta = J.fullPivLu().solve(G);
    double step = 1.0;
    Evaluation trial;
    SolitonParams next;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      next = apply_update(sigma, delta, d, step);
      trial = evaluate(psi, next, family);
      if (trial.residual < cur.residual) break;
      step *= 0.5;
    }
    sigma = next;
    cur = std::move(trial);
    st.residual_history.push_back(cur.residual);
    st.iterations = it + 1;
  }
  st.sigma = sigma;
  st.constraint_residual = cur.residual;
  const auto nr = norms(cur.w);
  st.w_l2 = nr.l2;
  st.w_h1 = nr.h1;
  st.w = std::move(cur.w);
  return st;
}

std::vector<AlphaRecord> alpha_residuals(const std::vector<ModulationState>& states, const PotentialSpec& V) {
  std::vector<AlphaRecord> out;
  if (states.size() < 3) return out;
  const int d = V.dim();
  for (std::size_t i = 1; i + 1 < states.size(); ++i) {
    const auto& p = states[i - 1].sigma;
    const auto& s = states[i].sigma;
    const auto& q = states[i + 1].sigma;
    const double dt = states[i + 1].t - states[i - 1].t;
    AlphaRecord rec;
    rec.t = states[i].t;
    rec.alpha.assign(2 * d + 2, 0.0);
    const auto g = V.gradient(s.a);
    double v2 = 0.0, adv = 0.0;
    for (int j = 0; j < d; ++j) {
      const double adot = (q.a[j] - p.a[j]) / dt;
      const double vdot = (q.v[j] - p.v[j]) / dt;
      rec.alpha[j] = adot - s.v[j];
      rec.alpha[d + j] = -0.5 * vdot - g[j];
      v2 += s.v[j] * s.v[j];
      adv += adot * s.v[j];
    }
    const double gdot = (q.gamma - p.gamma) / dt;
    rec.alpha[2 * d] = s.mu - 0.25 * v2 + 0.5 * adv - V.value(s.a) - gdot;
    rec.alpha[2 * d + 1] = -(q.mu - p.mu) / dt;
    for (double a : rec.alpha) rec.alpha_norm = std::max(rec.alpha_norm, std::abs(a));
    out.push_back(std::move(rec));
  }
  return out;
}

DeltaX delta_X_eval(const ModulationState& state, const std::vector<double>& alpha, const PotentialSpec& V,
                    const NonlinearitySpec& spec, const ProfileFamily& family) {
  const auto& grid = state.w.grid_ptr();
  const int d = grid->dim();
  const int n = 2 * d + 2;
  if (static_cast<int>(alpha.size()) != n) throw UsageError("delta_X_eval: alpha has the wrong length");
  const auto profile = family.at(state.sigma.mu);
  const auto rest = at_rest(state.sigma.mu);
  const ComplexField eta = synthesize(*profile, rest, grid);
  const auto frame = tangent_frame(*profile, rest, grid);
  const auto omega = omega_matrix(frame, *profile);
  const auto rem = nonlinear_remainders(spec, eta, state.w);
  const RealField RV = V.sample_remainder(grid, state.sigma.a);
  ComplexField RVpsi(grid), RVeta(grid), Jw(grid);
  const cplx I(0.0, 1.0);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    RVpsi[i] = RV[i] * (eta[i] + state.w[i]);
    RVeta[i] = RV[i] * eta[i];
    Jw[i] = -I * state.w[i];
  }

  bool any_alpha = false;
  for (double a : alpha) any_alpha = any_alpha || a != 0.0;
  std::optional<TangentFrame> dframe;
  if (any_alpha && alpha[n - 1] != 0.0) dframe = tangent_frame_mu_derivative(*profile, rest, grid);

  Eigen::VectorXd tN(n), tV(n), tA(n);
  for (int k = 0; k < n; ++k) {
    const auto& z = frame.z[k];
    tN[k] = real_inner(z, rem.N2);
    tV[k] = real_inner(z, RVpsi);
    double a = 0.0;
    if (any_alpha) {
      for (int m = 0; m < n; ++m) {
        if (alpha[m] == 0.0) continue;
        ComplexField Kz(grid);
        if (m < d) {
          Kz = gradient_component(z, m);
        } else if (m < 2 * d) {
          for (std::size_t i = 0; i < grid->size(); ++i) Kz[i] = I * grid->point(i)[m - d] * z[i];
        } else if (m == 2 * d) {
          for (std::size_t i = 0; i < grid->size(); ++i) Kz[i] = I * z[i];
        } else {
          Kz = dframe->z[k];
        }
        a += alpha[m] * real_inner(Kz, Jw);
      }
    }
    tA[k] = a;
  }
  const Eigen::VectorXd xN = omega.omega * tN;
  const Eigen::VectorXd xV = omega.omega * tV;
  const Eigen::VectorXd xA = omega.omega * tA;
  DeltaX out;
  out.value.resize(n);
  for (int k = 0; k < n; ++k) out.value[k] = xN[k] + xV[k] + xA[k];
  out.nonlinear_part = xN.norm();
  out.potential_part = xV.norm();
  out.alpha_part = xA.norm();
  out.RV_norm = l2_norm(RVeta);
  return out;
}

LyapunovRecord lyapunov_gap(const ModulationState& state, const NonlinearitySpec& spec, const RadialProfile& profile,
                            double rho) {
  const auto& grid = state.w.grid_ptr();
  const double mu = state.sigma.mu;
  const ComplexField eta = synthesize(profile, at_rest(mu), grid);
  const auto rem = nonlinear_remainders(spec, eta, state.w);
  LyapunovRecord rec;
  rec.rho_used = rho;
  rec.delta_E = 0.5 * (gradient_norm_squared(state.w) + mu * real_inner(state.w, state.w)) - rem.R2;
  ComplexField grad = laplacian(eta);
  const ComplexField f = apply_nonlinearity(spec, eta);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = -grad[i] + mu * eta[i] - f[i];
  rec.first_variation = real_inner(grad, state.w);
  if (state.w_h1 <= 0.05) rec.lower_bound_ok = rec.delta_E >= 0.25 * rho * state.w_h1 * state.w_h1;
  return rec;
}

TrackResult track(const ComplexField& psi0, const SolitonParams& sigma0, const EvolutionConfig& cfg,
                  const PotentialSpec& V, const NonlinearitySpec& spec, const ProfileFamily& family,
                  std::optional<double> rho, const TrackOptions& opt, TrackCallback on_record) {
  TrackResult res;
  const double eps_sq = V.eps_V() * V.eps_V();

  auto finish_alpha = [&](std::size_t i) {
    // α and δX at sample i once i-1 and i+1 are known.
    auto recs = alpha_residuals({res.states[i - 1], res.states[i], res.states[i + 1]}, V);
    auto& rec = recs.front();
    if (opt.compute_delta_X) {
      const auto dx = delta_X_eval(res.states[i], rec.alpha, V, spec, family);
      rec.delta_X = dx.value;
      double nrm = 0.0;
      for (double x : dx.value) nrm += x * x;
      rec.delta_X_norm = std::sqrt(nrm);
      rec.RV_norm = dx.RV_norm;
      const double w1 = res.states[i].w_h1;
      const double scale = rec.alpha_norm * res.states[i].w_l2 + eps_sq + w1 * w1;
      rec.delta_X_constant = scale > 0.0 ? rec.delta_X_norm / scale : 0.0;
    }
    res.alpha.push_back(std::move(rec));
  };

  auto observer = [&](double t, const ComplexField& psi, long) {
    SolitonParams guess = sigma0;
    if (!res.states.empty()) {
      const auto& prev = res.states.back();
      guess = prev.sigma;
      const double span = t - prev.t;
      const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(span) / 0.01)));
      for (int k = 0; k < sub; ++k) guess = newton_step(V, guess, span / sub);
    }
    try {
      ModulationState st = decompose(psi, guess, family, opt.decompose);
      st.t = t;
      st.sigma.gamma += 2.0 * std::numbers::pi * std::round((guess.gamma - st.sigma.gamma) / (2.0 * std::numbers::pi));
      LyapunovRecord lr;
      if (rho) {
        const auto prof = family.at(st.sigma.mu);
        lr = lyapunov_gap(st, spec, *prof, *rho);
      }
      res.states.push_back(std::move(st));
      res.lyapunov.push_back(lr);
      const std::size_t n = res.states.size();
      if (n == 1 && on_record) on_record(res.states[0], res.lyapunov[0], nullptr);
      if (n >= 3) {
        finish_alpha(n - 2);
        if (on_record) on_record(res.states[n - 2], res.lyapunov[n - 2], &res.alpha.back());
        res.states[n - 3].w = ComplexField();
      }
      return true;
    } catch (const Error& e) {
      res.ok = false;
      res.error_kind = e.kind();
      res.message = fmt::format("tracking failed at t={:.6g}: {}", t, e.what());
      return false;
    }
  };
  res.run = evolve_run(psi0, cfg, V, spec, {observer});
  if (on_record && res.states.size() >= 2) on_record(res.states.back(), res.lyapunov.back(), nullptr);
  if (res.ok && !res.run.ok) {
    res.ok = false;
    res.error_kind = res.run.error_kind;
    res.message = res.run.message;
  }
  return res;
}

}  // namespace nlsdyn
