#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlsdyn/evolve.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/linearization.hpp"
#include "nlsdyn/profile_family.hpp"

namespace nlsdyn {

struct DecomposeOptions {
  double trust_fraction = 0.3;  // ||ψ - η_σ||_{H¹} < trust_fraction·||η||_{H¹}
  double tolerance = 1e-10;     // on max_j |G_j| / ||η||
  int max_iterations = 50;
  int max_halvings = 5;
};

struct ModulationState {
  double t = 0.0;
  SolitonParams sigma;
  ComplexField w;  // moving frame
  double w_l2 = 0.0;
  double w_h1 = 0.0;
  int iterations = 0;
  double constraint_residual = 0.0;  // max_j |ω(w, z_j)|
  std::vector<double> residual_history;
};

// Skew-orthogonal decomposition ψ = S_σ(η_μ + w) with ω(w, z_{μ,j}) = 0.
ModulationState decompose(const ComplexField& psi, const SolitonParams& guess, const ProfileFamily& family,
                          const DecomposeOptions& opt = {});

// Constraint values G_j = ω(w, z_{μ,j}) for a given σ.
std::vector<double> constraint_values(const ComplexField& psi, const SolitonParams& sigma, const RadialProfile& profile);

// Removes from q its components along the frame so that ω(q, z_j) = 0 for all j.
ComplexField project_skew_orthogonal(const ComplexField& q, const TangentFrame& frame);

struct AlphaRecord {
  double t = 0.0;
  std::vector<double> alpha;   // translations, boosts, gauge, scaling
  std::vector<double> delta_X;
  double alpha_norm = 0.0;     // max |α_j|
  double delta_X_norm = 0.0;
  double delta_X_constant = 0.0;  // |δX| / (|α|·||w|| + ε_V² + ||w||²_{H¹})
  double RV_norm = 0.0;        // ||R_V η||
};

// α from centered differences of the tracked parameters at interior samples.
std::vector<AlphaRecord> alpha_residuals(const std::vector<ModulationState>& states, const PotentialSpec& V);

struct DeltaX {
  std::vector<double> value;
  double nonlinear_part = 0.0;  // |Ω ⟨z, N_η(w)⟩|
  double potential_part = 0.0;
  double alpha_part = 0.0;
  double RV_norm = 0.0;
};

DeltaX delta_X_eval(const ModulationState& state, const std::vector<double>& alpha, const PotentialSpec& V,
                    const NonlinearitySpec& spec, const ProfileFamily& family);

struct LyapunovRecord {
  double delta_E = 0.0;            // E_μ(η+w) - E_μ(η) without the first variation
  double first_variation = 0.0;    // <E'_μ(η), w>, zero for the exact profile
  std::optional<bool> lower_bound_ok;  // evaluated when ||w||_{H¹} <= 0.05
  double rho_used = 0.0;
};

LyapunovRecord lyapunov_gap(const ModulationState& state, const NonlinearitySpec& spec, const RadialProfile& profile,
                            double rho);

struct TrackOptions {
  DecomposeOptions decompose;
  bool compute_delta_X = true;
};

struct TrackResult {
  RunResult run;
  std::vector<ModulationState> states;
  std::vector<AlphaRecord> alpha;
  std::vector<LyapunovRecord> lyapunov;
  bool ok = true;
  std::string message;
  Error::Kind error_kind = Error::Kind::numerical;
};

// Receives each sample once its α is known: the first and last samples carry no α.
using TrackCallback = std::function<void(const ModulationState&, const LyapunovRecord&, const AlphaRecord*)>;

// Evolves ψ₀ and decomposes at every sample, warm-started by the Newton flow.
TrackResult track(const ComplexField& psi0, const SolitonParams& sigma0, const EvolutionConfig& cfg,
                  const PotentialSpec& V, const NonlinearitySpec& spec, const ProfileFamily& family,
                  std::optional<double> rho, const TrackOptions& opt = {}, TrackCallback on_record = {});

}  // namespace nlsdyn
