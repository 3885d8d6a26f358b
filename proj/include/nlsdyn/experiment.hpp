#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlsdyn/config.hpp"
#include "nlsdyn/fit.hpp"
#include "nlsdyn/linearization.hpp"
#include "nlsdyn/model.hpp"
#include "nlsdyn/output.hpp"

namespace nlsdyn {

struct RunOptions {
  bool write_outputs = true;
  bool certify = true;  // off: no ρ, no Lyapunov lower-bound checks
};

// Everything a run reports. Written to summary.json exactly once.
struct RunSummary {
  std::string status = "ok";  // ok | config | certification | numerical | usage
  std::string stage;          // stage that failed, empty on success
  std::string message;
  std::string out_dir;
  std::vector<std::string> artifacts;

  ConditionReport conditions;
  bool certified = false;
  int negative_L1 = -1;
  int negative_L2 = -1;
  bool condition_F = false;
  std::optional<double> rho;
  double mass = 0.0;
  double dmass = 0.0;

  double t_end = 0.0;
  double t_reached = 0.0;
  bool completed = false;
  double wall_time = 0.0;

  // Named scalar observables in insertion order.
  std::vector<std::pair<std::string, double>> observables;
  std::optional<bool> lyapunov_ok;
  int lyapunov_checked = 0;

  bool ok() const { return status == "ok"; }
  int exit_code() const;
  std::optional<double> observable(const std::string& name) const;
  JsonObject to_json() const;
};

// Full pipeline: conditions, profile, certification, initial data, tracked evolution,
// effective flow, comparison. A run with t_end = 0 stops after certification.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Initial fluctuation: a seeded Gaussian bump in the moving frame, made skew-orthogonal
// to the frame at (0, 0, 0, μ) and scaled to H¹ norm eps0.
ComplexField initial_perturbation(const ExperimentConfig& cfg, const RadialProfile& profile, const GridPtr& grid);

struct SweepMember {
  double value = 0.0;
  bool ok = false;
  std::string status;
  std::string message;
  std::vector<std::pair<std::string, double>> observables;
};

struct OrderFit {
  std::string observable;
  bool ok = false;  // false when too few members produced the observable
  LogLogFit fit;
  std::string note;
};

struct SweepReport {
  std::string parameter;
  std::vector<SweepMember> members;
  std::vector<OrderFit> fits;
  bool all_members_ok() const;
  const OrderFit* find(const std::string& observable) const;
  JsonObject to_json() const;
  std::string to_text() const;
};

// Runs one experiment per value concurrently and fits log-log slopes of each observable.
SweepReport sweep_orders(const ExperimentConfig& base, const std::string& parameter, const std::vector<double>& values,
                         const std::vector<std::string>& observables, int workers = 0, const RunOptions& opt = {});

}  // namespace nlsdyn
