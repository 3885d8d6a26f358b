#pragma once

#include <array>
#include <vector>

#include "nlsdyn/profile.hpp"

namespace nlsdyn {

struct SolitonParams {
  std::array<double, 2> a{0.0, 0.0};
  std::array<double, 2> v{0.0, 0.0};
  double gamma = 0.0;
  double mu = 1.0;
};

// z_{σ,j} = S_{avγ} z_{μ,j}, ordered translations (d), boosts (d), gauge, scaling.
struct TangentFrame {
  int dim = 1;
  std::vector<ComplexField> z;
  std::size_t count() const { return z.size(); }
  const ComplexField& translation(int j) const { return z[j]; }
  const ComplexField& boost(int j) const { return z[dim + j]; }
  const ComplexField& gauge() const { return z[2 * dim]; }
  const ComplexField& scaling() const { return z[2 * dim + 1]; }
};

// Throws NumericalError when |a_j| + 10/√μ reaches the box edge.
void check_guard(const SpatialGrid& grid, const SolitonParams& sigma, const char* where);

// η_σ(x) = exp(i(½v·(x-a)+γ)) η_μ(|x-a|), with x-a taken periodically.
ComplexField synthesize(const RadialProfile& profile, const SolitonParams& sigma, const GridPtr& grid);
TangentFrame tangent_frame(const RadialProfile& profile, const SolitonParams& sigma, const GridPtr& grid);
// ∂_μ of each frame vector at σ; needs ∂_μ²η in the profile.
TangentFrame tangent_frame_mu_derivative(const RadialProfile& profile, const SolitonParams& sigma, const GridPtr& grid);

// u = S⁻¹_{avγ}ψ and its inverse; the shift is a Fourier shift.
ComplexField frame_transform(const ComplexField& psi, const SolitonParams& sigma);
ComplexField frame_inverse(const ComplexField& u, const SolitonParams& sigma);

}  // namespace nlsdyn
