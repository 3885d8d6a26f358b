#pragma once

#include <string>
#include <vector>

#include "nlsdyn/frame.hpp"
#include "nlsdyn/potential.hpp"

namespace nlsdyn {

// ȧ = v, v̇ = -2∇V(a), μ̇ = 0, γ̇ = μ + v²/4 - V(a).
std::array<double, 6> newton_rhs(const PotentialSpec& V, const SolitonParams& s);

// One classical RK4 step of the Newton flow.
SolitonParams newton_step(const PotentialSpec& V, const SolitonParams& s, double dt);

// v²/4 + V(a)
double particle_energy(const PotentialSpec& V, const SolitonParams& s);

struct EffectiveTrajectory {
  std::vector<double> t;
  std::vector<SolitonParams> sigma;
  double dt = 0.0;
  double energy_drift = 0.0;  // max |E(t) - E(0)|
  int dim = 1;

  // Cubic Hermite in time, using the flow's own derivatives.
  SolitonParams at(double time, const PotentialSpec& V) const;
};

// Negative t_end integrates backwards.
EffectiveTrajectory newton_flow(const SolitonParams& sigma0, const PotentialSpec& V, double t_end, double dt);

struct TrackedSample {
  double t = 0.0;
  SolitonParams sigma;
};

struct DeviationReport {
  double t_start = 0.0;
  double t_stop = 0.0;
  double sup_a = 0.0;
  double sup_v = 0.0;
  double sup_gamma = 0.0;      // unwrapped
  double sup_gamma_mod = 0.0;  // distance on the circle
  double sup_mu = 0.0;         // |μ - μ₀|
  std::size_t samples = 0;
  std::string to_text() const;
};

// Restricts to tracked samples with t <= t_stop (all when t_stop < 0).
DeviationReport compare_trajectories(const std::vector<TrackedSample>& tracked, const EffectiveTrajectory& eff,
                                     const PotentialSpec& V, double t_stop = -1.0);

void write_effective_csv(const std::string& path, const EffectiveTrajectory& eff);

}  // namespace nlsdyn
