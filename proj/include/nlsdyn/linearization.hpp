#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlsdyn/frame.hpp"

namespace nlsdyn {

// Radial sector k of L₁ (block 1) or L₂ (block 2): -Δ_r + λ_k/r² + μ - f^{(b)}(η),
// cell-centred finite volumes, symmetrized by the measure r^{d-1}. For d = 1 the
// sectors are parity classes: k = 0 even, k = 1 odd.
struct RadialOperator {
  int block = 1;
  int sector = 0;
  int dim = 1;
  int multiplicity = 1;
  double lambda_k = 0.0;
  double mu = 1.0;
  double h = 0.0;
  std::vector<double> r;          // cell centres
  std::vector<double> weight;     // r^{d-1}
  std::vector<double> potential;  // λ_k/r² - f^{(b)}(η)
  std::vector<double> diag, off;  // symmetric tridiagonal in flat variables
  std::size_t size() const { return r.size(); }
  // Same discretization with the potential replaced by λ_k/r² + shift.
  void gram(double shift, std::vector<double>& gdiag, std::vector<double>& goff) const;
};

// Dense pseudo-spectral block on a periodic 1D grid.
struct FullGridOperator {
  int block = 1;
  GridPtr grid;
  Eigen::MatrixXd matrix;
};

struct AssemblyOptions {
  int radial_points = 4096;
  int full_points = 512;
  bool include_full = false;  // always on for Hartree laws
};

struct OperatorSet {
  double mu = 1.0;
  int dim = 1;
  int k_max = 1;
  NonlinearitySpec spec = NonlinearitySpec::power(1.0, 1.0);
  AssemblyOptions options;
  std::vector<RadialOperator> radial;  // empty for Hartree laws
  std::vector<FullGridOperator> full;
  const RadialOperator& radial_op(int block, int sector) const;
  const FullGridOperator& full_op(int block) const;
};

OperatorSet assemble_operators(const RadialProfile& profile, const NonlinearitySpec& spec, int k_max,
                               const AssemblyOptions& opt = {});

// Lowest eigenpairs of a symmetric tridiagonal matrix (LAPACK dstevx).
struct TridiagEigen {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // columns
};
TridiagEigen tridiagonal_lowest(const std::vector<double>& diag, const std::vector<double>& off, int count,
                                bool vectors);

struct SectorSpectrum {
  int block = 1;
  int sector = 0;
  int multiplicity = 1;
  std::vector<double> values;  // Richardson-extrapolated where available
};

struct SymplecticMatrix {
  Eigen::MatrixXd omega_inv;  // entries ω(z_j, z_k) = <z_j, J⁻¹ z_k>
  Eigen::MatrixXd omega;      // its inverse
  double m = 0.0;
  double dm = 0.0;
  double antisymmetry_error = 0.0;
  double inverse_error = 0.0;
};

struct SpectralReport {
  double mu = 1.0;
  int dim = 1;
  int negative_L1 = 0;
  int negative_L2 = 0;
  std::vector<double> lowest_L1, lowest_L2;  // six smallest, with multiplicity
  std::vector<SectorSpectrum> sectors;
  double zero_eigenvalue_L1 = 0.0;   // eigenvalue of the translation mode
  double zero_eigenvalue_L2 = 0.0;   // eigenvalue of the gauge mode
  double zero_overlap_L1 = 0.0;      // against ∂η
  double zero_overlap_L2 = 0.0;      // against η
  double null_residual_L1 = 0.0;     // max_j ||L₁∂_jη|| / ||∂_jη||
  double null_residual_L2 = 0.0;     // ||L₂η|| / ||η||
  double algebra_residual[4] = {0, 0, 0, 0};  // 𝓛z_t, 𝓛z_g, 𝓛z_b - 2iz_t, 𝓛z_s - iz_g (relative)
  double eta_L1inv_eta = 0.0;        // <η, L₁⁻¹η>, expected -m'(μ)
  double sector_min[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};  // lowest eigenvalue of A_{μ,k}
  bool condition_F = false;
  std::string condition_F_detail;
  std::optional<SymplecticMatrix> omega;
  std::string omega_error;  // set when the frame form is degenerate
  std::optional<double> rho;
  double rho_refined = 0.0;
  double rho_unconstrained = 0.0;
  std::string rho_error;  // why ρ was not produced

  std::string to_text() const;
};

SpectralReport spectral_report(const OperatorSet& ops, const RadialProfile& profile);

// Matrix of ω(z_j, z_k) over the frame and its inverse. Throws when |m'| < 1e-6.
SymplecticMatrix omega_matrix(const TangentFrame& frame, const RadialProfile& profile);

struct CoercivityResult {
  double rho = 0.0;
  double rho_refined = 0.0;
  double refinement_change = 0.0;  // relative
  double unconstrained = 0.0;
  int points = 0;
};

struct CoercivityOptions {
  int points = 512;
  bool refine = true;
};

// min <w, 𝓛w> / ||w||²_{H¹} over w skew-orthogonal to the frame.
CoercivityResult coercivity(const OperatorSet& ops, const RadialProfile& profile, const CoercivityOptions& opt = {});

// Cartesian grid used for residual checks of a profile.
GridPtr certification_grid(const RadialProfile& profile);

// 𝓛w = (-Δ + μ)w - f'(η)w.
ComplexField apply_linearized(const NonlinearitySpec& spec, const RealField& eta, double mu, const ComplexField& w);

struct CertifyOptions {
  int k_max = 4;
  AssemblyOptions assembly;
  CoercivityOptions coercivity;
};

// Spectral report plus Ω matrix and ρ (when Condition F holds).
SpectralReport certify(const RadialProfile& profile, const NonlinearitySpec& spec, const CertifyOptions& opt = {});

}  // namespace nlsdyn
