#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "nlsdyn/profile.hpp"

namespace nlsdyn {

// Profiles η_μ for μ in an interval I₀, each with ∂_μη and ∂_μ²η.
// Power laws use the exact scaling η_μ(r) = (μ/μ_b)^{1/2s} η_b(√(μ/μ_b) r) from one solve;
// other laws interpolate a lattice of solves (spacing 0.01) with 6-point Lagrange in μ.
class ProfileFamily {
 public:
  ProfileFamily(NonlinearitySpec spec, int d, double mu_lo, double mu_hi, ProfileOptions opt = {},
                double spacing = 0.01);

  const NonlinearitySpec& spec() const { return spec_; }
  int dim() const { return d_; }
  double mu_lo() const { return mu_lo_; }
  double mu_hi() const { return mu_hi_; }
  bool contains(double mu) const { return mu >= mu_lo_ && mu <= mu_hi_; }

  std::shared_ptr<const RadialProfile> at(double mu) const;

 private:
  std::shared_ptr<const RadialProfile> lattice(int j) const;
  std::shared_ptr<const RadialProfile> build(double mu) const;
  std::shared_ptr<const RadialProfile> scaled(double mu) const;
  std::shared_ptr<const RadialProfile> interpolated(double mu) const;

  NonlinearitySpec spec_;
  int d_;
  double mu_lo_, mu_hi_;
  ProfileOptions opt_;
  double spacing_;
  double lattice_origin_;

  mutable std::mutex mutex_;
  mutable std::shared_ptr<RadialProfile> base_;
  mutable std::map<int, std::shared_ptr<const RadialProfile>> lattice_;
  mutable std::map<double, std::shared_ptr<const RadialProfile>> recent_;
};

}  // namespace nlsdyn
