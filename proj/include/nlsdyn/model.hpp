#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nlsdyn/grid.hpp"

namespace nlsdyn {

class PotentialSpec;

// f(ψ) = h(|ψ|²)ψ for local laws, f(ψ) = (W*|ψ|²)ψ for Hartree.
class NonlinearitySpec {
 public:
  enum class Kind { power, local, hartree };
  using ScalarFn = std::function<double(double)>;
  using KernelBuilder = std::function<RealField(const GridPtr&)>;

  static NonlinearitySpec power(double s, double lambda);
  static NonlinearitySpec local(ScalarFn h, ScalarFn dh, ScalarFn d2h, std::string name, double homogeneity = 3.0);
  static NonlinearitySpec hartree(KernelBuilder kernel, std::string name);
  // Hartree with W(x) = strength * exp(-|x|²/(2 width²)) / (2π width²)^{d/2}.
  static NonlinearitySpec hartree_gaussian(double strength, double width);
  // Hartree whose kernel is the lattice delta 1/h^d at the origin.
  static NonlinearitySpec hartree_delta(double strength);

  Kind kind() const { return kind_; }
  bool is_local() const { return kind_ != Kind::hartree; }
  double exponent() const { return s_; }
  double coupling() const { return lambda_; }
  const std::string& name() const { return name_; }
  std::string describe() const;

  // Local law pieces. For Hartree these are zero.
  double h(double p) const;
  double dh(double p) const;
  double d2h(double p) const;
  // H(p) = ∫₀^p h.
  double H(double p) const;
  // Remainders of H around p0: H(p0+δ)-H(p0)-h(p0)δ and minus the next Taylor term.
  double H_remainder2(double p0, double delta) const;
  double H_remainder3(double p0, double delta) const;

  // Leading homogeneity p of f, used by the Petviashvili iteration.
  double homogeneity() const { return homogeneity_; }

  // Fourier transform of the recentred kernel times h^d, cached per grid.
  const std::vector<cplx>& kernel_hat(const GridPtr& grid) const;
  RealField kernel(const GridPtr& grid) const;

 private:
  NonlinearitySpec() = default;
  struct KernelCache;

  Kind kind_ = Kind::power;
  double s_ = 1.0;
  double lambda_ = 1.0;
  double homogeneity_ = 3.0;
  std::string name_;
  ScalarFn h_, dh_, d2h_;
  KernelBuilder kernel_;
  std::shared_ptr<KernelCache> cache_;
};

// Pointwise multiplier M with f(ψ) = M ψ; equals h(|ψ|²) or W*|ψ|².
RealField nonlinear_multiplier(const NonlinearitySpec& spec, const ComplexField& psi);
ComplexField apply_nonlinearity(const NonlinearitySpec& spec, const ComplexField& psi);

// Block pieces on a real profile: f1 acts on Re w, f2 on Im w.
ComplexField linearized_action(const NonlinearitySpec& spec, const RealField& eta, const ComplexField& w);

struct Remainders {
  ComplexField fprime_w;  // f'(η)w
  ComplexField N2;        // f(η+w) - f(η) - f'(η)w
  double R2;              // F(η+w) - F(η) - <f(η),w>
  double R3;              // R2 - ½<f'(η)w,w>
};

// Rejects η with an imaginary part.
Remainders nonlinear_remainders(const NonlinearitySpec& spec, const ComplexField& eta, const ComplexField& w);
RealField require_real_profile(const ComplexField& eta, const char* where);

double nonlinear_energy(const NonlinearitySpec& spec, const ComplexField& psi);

struct Functionals {
  double mass_N;
  double energy_HV;
  double energy_Emu;
  double F_val;
  std::array<double, 2> momentum;
};

Functionals functionals(const NonlinearitySpec& spec, const ComplexField& psi, const RealField& V, double mu);
Functionals functionals(const NonlinearitySpec& spec, const ComplexField& psi, const PotentialSpec& V, double mu);

double mass(const ComplexField& psi);
std::array<double, 2> momentum(const ComplexField& psi);

struct ConditionItem {
  std::string name;
  bool pass;
  std::string evidence;
};

struct ConditionReport {
  std::vector<ConditionItem> items;
  bool all_pass() const;
  const ConditionItem* find(const std::string& name) const;
};

ConditionReport verify_conditions(const NonlinearitySpec& spec, int d);

}  // namespace nlsdyn
