#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nlsdyn/evolve.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/modulation.hpp"
#include "nlsdyn/potential.hpp"

namespace nlsdyn {

// Sectioned key/value experiment description. Every field has a default.
struct ExperimentConfig {
  // [grid]
  int dim = 1;
  int n = 2048;
  double half_extent = 60.0;

  // [nonlinearity] law = power | hartree_gaussian | hartree_delta
  std::string law = "power";
  double s = 1.0;
  double lambda = 1.0;
  double strength = 1.0;
  double width = 1.0;

  // [potential] family = zero | constant | cosine | gaussian_well
  std::string family = "zero";
  std::optional<double> eps_V;
  double amplitude = -0.5;
  std::optional<double> rate;
  double value = 0.0;

  // [initial]; a_phase places the soliton at a = a_phase / κ along each axis
  std::array<double, 2> a{0.0, 0.0};
  std::optional<double> a_phase;
  std::array<double, 2> v{0.0, 0.0};
  double gamma = 0.0;
  double mu = 1.0;
  std::string perturbation = "none";  // none | bump
  double eps0 = 0.0;
  double bump_width = 1.0;
  double bump_offset = 0.5;

  // [evolution]; without t_end the run lasts horizon / (ε_V + ε₀²)
  double dt = 0.005;
  std::optional<double> t_end;
  double horizon = 1.0;
  int stride = 20;
  bool dealias = false;
  double mass_tolerance = 1e-8;
  double energy_tolerance = 1e-2;
  double compare_time = 20.0;

  // [tracking]
  double tolerance = 1e-10;
  int max_iterations = 50;
  double trust = 0.3;

  // [interval]
  double mu_lo = 0.5;
  double mu_hi = 2.0;

  // [certification]
  int k_max = 4;
  int coercivity_points = 512;
  int radial_points = 4096;

  // [output]
  std::string out_dir = "out";
  unsigned long seed = 1;
  int snapshot_stride = 0;  // samples between binary snapshots; 0 disables

  NonlinearitySpec nonlinearity() const;
  PotentialSpec potential() const;
  SolitonParams sigma0() const;
  double resolved_t_end() const;
  EvolutionConfig evolution() const;
  DecomposeOptions decomposition() const;

  // Collects every invariant violation; throws ConfigError listing them.
  void validate() const;
  std::string to_ini() const;
};

ExperimentConfig parse_config(const std::string& text, bool strict = true, std::vector<std::string>* warnings = nullptr);
ExperimentConfig load_config(const std::string& path, bool strict = true, std::vector<std::string>* warnings = nullptr);

// Sweep parameters: eps_V, eps_0, dt.
void set_parameter(ExperimentConfig& cfg, const std::string& name, double value);

}  // namespace nlsdyn
