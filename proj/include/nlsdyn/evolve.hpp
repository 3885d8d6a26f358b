#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "nlsdyn/error.hpp"
#include "nlsdyn/model.hpp"
#include "nlsdyn/potential.hpp"

namespace nlsdyn {

struct EvolutionConfig {
  double dt = 0.005;
  double t_end = 0.0;
  int stride = 20;                 // steps between diagnostics
  bool dealias = false;            // 2/3 rule on the kinetic step
  double mass_tolerance = 1e-8;    // relative drift of N before halting
  double energy_tolerance = 1e-2;  // relative drift of H_V before halting
  double guard_mu = 1.0;           // margin 10/√μ for the boundary guard; <= 0 disables it

  // dt·max|k|², reported against 2π.
  double stiffness(const SpatialGrid& g) const;
  void validate() const;
};

struct ConservationRecord {
  double t = 0.0;
  double N = 0.0;
  double HV = 0.0;
  std::array<double, 2> momentum{0.0, 0.0};
  std::array<double, 2> force{0.0, 0.0};      // -<ψ, (∇V)ψ>
  std::array<double, 2> ehrenfest{0.0, 0.0};  // dP/dt - force, filled by the monitor
  double ehrenfest_relative = 0.0;            // |residual| / (sup|∇V|·2N)
};

// Strang splitting: half nonlinear/potential phase, full kinetic step, half phase.
class StrangStepper {
 public:
  StrangStepper(NonlinearitySpec spec, const PotentialSpec& V, GridPtr grid, double dt, bool dealias = false);
  void step(ComplexField& psi) const;
  double dt() const { return dt_; }
  const RealField& potential() const { return V_; }

 private:
  void phase(ComplexField& psi, double tau) const;
  NonlinearitySpec spec_;
  GridPtr grid_;
  RealField V_;
  double dt_;
  std::vector<std::complex<long double>> kinetic_;
  mutable std::vector<std::complex<long double>> work_;
};

ComplexField strang_step(const ComplexField& psi, double dt, const PotentialSpec& V, const NonlinearitySpec& spec);

// Observer receives (time, ψ, step index). Returning false stops the run.
using Observer = std::function<bool(double, const ComplexField&, long)>;

struct RunResult {
  bool ok = true;
  Error::Kind error_kind = Error::Kind::numerical;
  std::string message;
  double t = 0.0;
  long steps = 0;
  ComplexField psi;  // last good state
  std::vector<ConservationRecord> conservation;
};

// Calls observers at t=0 and every stride. Stops early on guard or drift violations.
RunResult evolve_run(const ComplexField& psi0, const EvolutionConfig& cfg, const PotentialSpec& V,
                     const NonlinearitySpec& spec, const std::vector<Observer>& observers = {});

// Location of max |ψ| on the grid.
std::array<double, 2> peak_location(const ComplexField& psi);

ConservationRecord conservation_sample(double t, const ComplexField& psi, const NonlinearitySpec& spec,
                                       const PotentialSpec& V, const RealField& Vgrid);

// Centered-difference Ehrenfest residuals at interior samples; endpoints copy neighbours.
void invariant_monitor(std::vector<ConservationRecord>& records, double sup_gradient);

struct EhrenfestSummary {
  double integrated_absolute = 0.0;
  double integrated_relative = 0.0;  // ∫|res| / ∫ sup|∇V|·2N
  double max_relative = 0.0;
};
EhrenfestSummary summarize_ehrenfest(const std::vector<ConservationRecord>& records, double sup_gradient);

// Binary snapshot: int64 n, int64 d, float64 half-extent, float64 t, then (re, im) pairs.
void append_snapshot(const std::string& path, const ComplexField& psi, double t);
struct Snapshot {
  int n = 0;
  int d = 0;
  double half_extent = 0.0;
  double t = 0.0;
  std::vector<cplx> values;
};
std::vector<Snapshot> read_snapshots(const std::string& path);

}  // namespace nlsdyn
