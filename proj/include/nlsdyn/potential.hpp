#pragma once

#include <array>
#include <optional>
#include <string>

#include "nlsdyn/grid.hpp"

namespace nlsdyn {

// External potential with analytic gradient and Hessian.
//   cosine:        V = A Σ_j cos(κ_j x_j)
//   gaussian_well: V = -A exp(-κ²|x|²/2)
class PotentialSpec {
 public:
  enum class Family { zero, constant, cosine, gaussian_well };

  static PotentialSpec zero(int d);
  static PotentialSpec constant(int d, double value);
  static PotentialSpec cosine(int d, double amplitude, std::array<double, 2> rate, double mu0,
                              std::optional<double> declared_eps = std::nullopt);
  // Rate along every axis chosen so that sup|∇V|/√μ₀ = eps.
  static PotentialSpec cosine_from_eps(int d, double amplitude, double eps, double mu0);
  static PotentialSpec gaussian_well(int d, double depth, double rate, double mu0,
                                     std::optional<double> declared_eps = std::nullopt);
  static PotentialSpec gaussian_well_from_eps(int d, double depth, double eps, double mu0);

  Family family() const { return family_; }
  int dim() const { return d_; }
  double amplitude() const { return amplitude_; }
  std::array<double, 2> rate() const { return rate_; }
  double mu0() const { return mu0_; }
  std::string describe() const;

  double value(std::array<double, 2> x) const;
  std::array<double, 2> gradient(std::array<double, 2> x) const;
  std::array<double, 4> hessian(std::array<double, 2> x) const;

  double sup_gradient() const;
  double eps_V() const { return eps_; }

  RealField sample(const GridPtr& grid) const;
  RealField sample_gradient(const GridPtr& grid, int axis) const;
  // R_V(x) = V(x+a) - V(a) - ∇V(a)·x sampled on the grid.
  RealField sample_remainder(const GridPtr& grid, std::array<double, 2> a) const;

 private:
  PotentialSpec() = default;
  void finalize(std::optional<double> declared);

  Family family_ = Family::zero;
  int d_ = 1;
  double amplitude_ = 0.0;
  std::array<double, 2> rate_{0.0, 0.0};
  double mu0_ = 1.0;
  double eps_ = 0.0;
};

}  // namespace nlsdyn
