#pragma once

#include <string>
#include <vector>

#include "nlsdyn/model.hpp"

namespace nlsdyn {

// Samples of a radial function with its first two r-derivatives.
struct RadialSeries {
  std::vector<double> f, df, d2f;
  bool empty() const { return f.empty(); }
};

// Ground state η_μ on r_i = i h, i = 0..N-1, with h = r_max / N and η = 0 beyond r_max.
class RadialProfile {
 public:
  double mu = 0.0;
  int dim = 1;
  double h = 0.0;
  double r_max = 0.0;
  double residual = 0.0;       // sup |(-Δ_r + μ)η - f(η)| on the radial grid
  double mu_residual = 0.0;    // sup |A_{μ,0} ∂_μη + η|
  std::string spec_name;
  std::vector<double> r;
  RadialSeries eta;
  RadialSeries dmu;    // ∂_μ η
  RadialSeries dmu2;   // ∂_μ² η, filled by profile families
  double mass = 0.0;   // m(μ) = ½∫η²
  double dmass = 0.0;  // m'(μ) = <η, ∂_μη>

  std::size_t size() const { return r.size(); }
  double eta0() const { return eta.f.empty() ? 0.0 : eta.f[0]; }

  struct Sample {
    double eta = 0.0, deta = 0.0, d2eta = 0.0;
    double dmu = 0.0, ddmu = 0.0;
    double dmu2 = 0.0;
  };
  // Quintic Hermite interpolation using (f, f', f'') at the nodes.
  Sample eval(double radius) const;
  double interpolate(const RadialSeries& s, double radius) const;
  double interpolate_derivative(const RadialSeries& s, double radius) const;
};

struct ProfileOptions {
  int points = 8192;
  double r_max_scale = 40.0;  // r_max = r_max_scale / √μ
  double residual_tol = 1e-9; // relative to η(0)
};

RadialProfile solve_profile(const NonlinearitySpec& spec, double mu, int d, const ProfileOptions& opt = {});

// Solves A_{μ,0} u = -η on the profile's grid and returns u.
std::vector<double> mu_derivative(const RadialProfile& profile, const NonlinearitySpec& spec);

// ½(1/s + r∂_r)η / μ for the pure power law.
std::vector<double> power_mu_derivative(const RadialProfile& profile, double s);

// Independent initial-value shooting for η(0) (local laws, any d).
double shooting_eta0(const NonlinearitySpec& spec, double mu, int d, double step = 1e-3);

// Radial integrals ∫ g d^d x for a radial g sampled on the profile grid.
double radial_integral(const RadialProfile& p, const std::vector<double>& g);
double radial_integral(int dim, double h, const std::vector<double>& g);

// First and second r-derivatives by 8th-order central differences with
// even (parity = +1) or odd reflection at r = 0 and zero beyond the last node.
void radial_fd_derivatives(const std::vector<double>& f, double h, int parity, std::vector<double>& df,
                           std::vector<double>& d2f);

struct MassCurve {
  std::vector<double> mu, m, dm;
  bool stable = true;  // m' > 0 at every sample
};

MassCurve mass_curve(const NonlinearitySpec& spec, const std::vector<double>& mus, int d, const ProfileOptions& opt = {});

// Plain-text export: header lines starting with '#', then rows r eta eta' dmu_eta.
void write_profile_table(const RadialProfile& p, const std::string& path);
std::string profile_table(const RadialProfile& p);

}  // namespace nlsdyn
