#pragma once

#include <array>
#include <vector>

#include "nlsdyn/grid.hpp"

namespace nlsdyn {

// In-place transforms on n^d samples laid out like the grid.
// Forward is unnormalized; inverse includes the 1/n^d factor.
void fft_forward_inplace(const SpatialGrid& g, cplx* data);
void fft_inverse_inplace(const SpatialGrid& g, cplx* data);

std::vector<cplx> fft_forward(const ComplexField& u);

// data <- F⁻¹(mult · F data) carried out in extended precision; `work` is scratch.
void fourier_multiply_extended(const SpatialGrid& g, cplx* data, const std::vector<std::complex<long double>>& mult,
                               std::vector<std::complex<long double>>& work);
ComplexField fft_inverse(const GridPtr& grid, std::vector<cplx> spectrum);

struct Pairings {
  double real_inner;  // Re ∫ u conj(v)
  double symplectic;  // Im ∫ u conj(v)
};

Pairings inner_products(const ComplexField& u, const ComplexField& v);
double real_inner(const ComplexField& u, const ComplexField& v);
double symplectic(const ComplexField& u, const ComplexField& v);
double integrate(const RealField& f);

ComplexField spectral_derivative(const ComplexField& u, int axis, int order);
ComplexField gradient_component(const ComplexField& u, int axis);
ComplexField laplacian(const ComplexField& u);

struct Norms {
  double l2;
  double h1;
};

Norms norms(const ComplexField& u);
double l2_norm(const ComplexField& u);
double h1_norm(const ComplexField& u);
// Squared Dirichlet seminorm sum_j ||d_j u||^2 computed in Fourier space.
double gradient_norm_squared(const ComplexField& u);

// (W*g)(x) = ∫ W(x-y) g(y) dy on the torus. W is sampled on the grid coordinates,
// so its origin sits at the grid point x = 0.
RealField periodic_convolution(const RealField& W, const RealField& g);
// Variant taking the precomputed transform of the recentred kernel.
RealField periodic_convolution_hat(const std::vector<cplx>& W_hat, const RealField& g);
std::vector<cplx> kernel_transform(const RealField& W);

// u(x) -> u(x - shift), exact for band-limited u.
ComplexField fourier_shift(const ComplexField& u, std::array<double, 2> shift);

}  // namespace nlsdyn
