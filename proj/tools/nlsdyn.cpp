#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nlsdyn/config.hpp"
#include "nlsdyn/experiment.hpp"
#include "nlsdyn/output.hpp"
#include "nlsdyn/profile.hpp"

using namespace nlsdyn;

namespace {

int exit_for(Error::Kind k) {
  switch (k) {
    case Error::Kind::config: return 2;
    case Error::Kind::certification: return 3;
    case Error::Kind::numerical: return 4;
    case Error::Kind::usage: return 1;
  }
  return 1;
}

ExperimentConfig load(const std::string& path, const std::string& out, bool strict) {
  std::vector<std::string> warnings;
  ExperimentConfig cfg = load_config(path, strict, &warnings);
  for (const auto& w : warnings) fmt::print(stderr, "warning: {}\n", w);
  if (!out.empty()) cfg.out_dir = out;
  return cfg;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("--values: cannot parse '{}'", tok));
    }
  }
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) v.push_back(tok);
  return v;
}

int cmd_profile(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto spec = cfg.nonlinearity();
  const auto p = solve_profile(spec, cfg.mu, cfg.dim);
  ensure_directory(cfg.out_dir);
  const std::string path = cfg.out_dir + "/profile.txt";
  write_profile_table(p, path);
  std::vector<double> mus;
  for (int i = 0; i <= 8; ++i) mus.push_back(cfg.mu_lo + (cfg.mu_hi - cfg.mu_lo) * i / 8.0);
  const auto curve = mass_curve(spec, mus, cfg.dim);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < mus.size(); ++i) rows.push_back({curve.mu[i], curve.m[i], curve.dm[i]});
  write_csv(cfg.out_dir + "/mass_curve.csv", {"mu", "m", "dm"}, rows);
  fmt::print("{}", key_value_text({{"law", spec.describe()},
                                   {"mu", fmt::format("{:.17g}", p.mu)},
                                   {"eta0", fmt::format("{:.17g}", p.eta0())},
                                   {"residual", fmt::format("{:.6e}", p.residual)},
                                   {"mass", fmt::format("{:.17g}", p.mass)},
                                   {"dmass", fmt::format("{:.17g}", p.dmass)},
                                   {"stable_on_interval", curve.stable ? "true" : "false"},
                                   {"table", path}}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soliton dynamics laboratory for generalized NLS in slowly varying potentials"};
  app.require_subcommand(1);
  std::string config, out, param = "eps_V", values, observables = "sup_a_tstar,sup_alpha_tstar";
  int workers = 0;
  bool strict = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides [output] dir)");
    sub->add_flag("--strict", strict, "Reject unknown configuration keys");
  };
  auto* profile = app.add_subcommand("profile", "Solve the profile and export it with the mass curve");
  auto* spectrum = app.add_subcommand("spectrum", "Certify conditions, spectra, symplectic matrix and coercivity");
  auto* run = app.add_subcommand("run", "Run one experiment");
  auto* sweep = app.add_subcommand("sweep", "Order-of-convergence study over one parameter");
  for (auto* s : {profile, spectrum, run, sweep}) common(s);
  sweep->add_option("--param", param, "eps_V, eps_0 or dt")->check(CLI::IsMember({"eps_V", "eps_0", "dt"}));
  sweep->add_option("--values", values, "Comma-separated parameter values")->required();
  sweep->add_option("--observables", observables, "Comma-separated observable names");
  sweep->add_option("--workers", workers, "Concurrent runs (default: logical cores)");
  run->add_option("--workers", workers, "Ignored for single runs");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = load(config, out, strict);
    if (profile->parsed()) return cmd_profile(cfg);
    if (spectrum->parsed() || run->parsed()) {
      ExperimentConfig c = cfg;
      if (spectrum->parsed()) c.t_end = 0.0;
      const auto s = run_experiment(c);
      fmt::print("{}\n", s.to_json().str());
      if (!s.ok()) fmt::print(stderr, "error: {}\n", s.message);
      return s.exit_code();
    }
    const auto rep = sweep_orders(cfg, param, parse_values(values), split(observables), workers);
    fmt::print("{}", rep.to_text());
    if (!rep.all_members_ok()) return 4;
    return 0;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 4;
  }
}
