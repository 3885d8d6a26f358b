#include "nlsdyn/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "nlsdyn/error.hpp"

namespace nlsdyn {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"dim", "n", "half_extent"}},
      {"nonlinearity", {"law", "s", "lambda", "strength", "width"}},
      {"potential", {"family", "eps_V", "amplitude", "rate", "value"}},
      {"initial", {"a", "a_phase", "v", "gamma", "mu", "perturbation", "eps0", "bump_width", "bump_offset"}},
      {"evolution",
       {"dt", "t_end", "horizon", "stride", "dealias", "mass_tolerance", "energy_tolerance", "compare_time"}},
      {"tracking", {"tolerance", "max_iterations", "trust"}},
      {"interval", {"mu_lo", "mu_hi"}},
      {"certification", {"k_max", "coercivity_points", "radial_points"}},
      {"output", {"dir", "seed", "snapshot_stride"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (trim(raw.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, raw));
}

long to_long(const std::string& key, const std::string& raw) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(raw, &pos);
    if (trim(raw.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, raw));
}

bool to_bool(const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, raw));
}

std::array<double, 2> to_pair(const std::string& key, const std::string& raw) {
  std::istringstream is(raw);
  std::vector<std::string> parts;
  std::string tok;
  while (is >> tok) parts.push_back(tok);
  if (parts.empty() || parts.size() > 2) throw ConfigError(fmt::format("{}: expected one or two numbers", key));
  std::array<double, 2> out{0.0, 0.0};
  for (std::size_t i = 0; i < parts.size(); ++i) out[i] = to_double(key, parts[i]);
  return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : ""; }

}  // namespace

NonlinearitySpec ExperimentConfig::nonlinearity() const {
  if (law == "power") return NonlinearitySpec::power(s, lambda);
  if (law == "hartree_gaussian") return NonlinearitySpec::hartree_gaussian(strength, width);
  if (law == "hartree_delta") return NonlinearitySpec::hartree_delta(strength);
  throw ConfigError(fmt::format("nonlinearity.law: unknown law '{}'", law));
}

PotentialSpec ExperimentConfig::potential() const {
  if (family == "zero") return PotentialSpec::zero(dim);
  if (family == "constant") return PotentialSpec::constant(dim, value);
  if (family == "cosine") {
    if (eps_V) return PotentialSpec::cosine_from_eps(dim, amplitude, *eps_V, mu);
    return PotentialSpec::cosine(dim, amplitude, {*rate, dim == 2 ? *rate : 0.0}, mu);
  }
  if (family == "gaussian_well") {
    if (eps_V) return PotentialSpec::gaussian_well_from_eps(dim, amplitude, *eps_V, mu);
    return PotentialSpec::gaussian_well(dim, amplitude, *rate, mu);
  }
  throw ConfigError(fmt::format("potential.family: unknown family '{}'", family));
}

SolitonParams ExperimentConfig::sigma0() const {
  SolitonParams s{a, v, gamma, mu};
  if (a_phase) {
    const auto V = potential();
    for (int j = 0; j < dim; ++j) {
      const double k = V.rate()[j];
      if (k == 0.0) throw ConfigError("initial.a_phase needs a potential with a nonzero rate");
      s.a[j] = *a_phase / k;
    }
  }
  if (dim == 1) s.a[1] = s.v[1] = 0.0;
  return s;
}

double ExperimentConfig::resolved_t_end() const {
  if (t_end) return *t_end;
  const double scale = potential().eps_V() + eps0 * eps0;
  if (!(scale > 0.0)) throw ConfigError("evolution.t_end is required when eps_V and eps0 both vanish");
  return horizon / scale;
}

EvolutionConfig ExperimentConfig::evolution() const {
  EvolutionConfig e;
  e.dt = dt;
  e.t_end = resolved_t_end();
  e.stride = stride;
  e.dealias = dealias;
  e.mass_tolerance = mass_tolerance;
  e.energy_tolerance = energy_tolerance;
  e.guard_mu = mu;
  return e;
}

DecomposeOptions ExperimentConfig::decomposition() const {
  DecomposeOptions d;
  d.tolerance = tolerance;
  d.max_iterations = max_iterations;
  d.trust_fraction = trust;
  return d;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  auto check = [&](bool ok, std::string msg) {
    if (!ok) errs.push_back(std::move(msg));
  };
  check(dim == 1 || dim == 2, fmt::format("grid.dim must be 1 or 2 (got {})", dim));
  check(n >= 16 && (n & (n - 1)) == 0, fmt::format("grid.n must be a power of two >= 16 (got {})", n));
  check(half_extent > 0.0, "grid.half_extent must be positive");
  check(law == "power" || law == "hartree_gaussian" || law == "hartree_delta",
        fmt::format("nonlinearity.law: unknown law '{}'", law));
  check(law == "power" || dim == 1, "nonlinearity.law: Hartree laws require grid.dim = 1");
  check(family == "zero" || family == "constant" || family == "cosine" || family == "gaussian_well",
        fmt::format("potential.family: unknown family '{}'", family));
  if (family == "cosine" || family == "gaussian_well") {
    check(eps_V.has_value() != rate.has_value(), "potential: give exactly one of eps_V and rate");
    check(!eps_V || *eps_V > 0.0, "potential.eps_V must be positive");
    check(!rate || *rate > 0.0, "potential.rate must be positive");
    check(amplitude != 0.0, "potential.amplitude must be nonzero");
  } else {
    check(!eps_V && !rate, fmt::format("potential: eps_V/rate do not apply to family '{}'", family));
  }
  check(!a_phase || family == "cosine" || family == "gaussian_well", "initial.a_phase needs a cosine or gaussian_well potential");
  check(mu > 0.0, "initial.mu must be positive");
  check(mu_lo > 0.0 && mu_lo < mu_hi, "interval: need 0 < mu_lo < mu_hi");
  check(mu >= mu_lo && mu <= mu_hi, fmt::format("initial.mu = {} lies outside the interval [{}, {}]", mu, mu_lo, mu_hi));
  check(eps0 >= 0.0, fmt::format("initial.eps0 must be non-negative (got {})", eps0));
  check(perturbation == "none" || perturbation == "bump",
        fmt::format("initial.perturbation must be none or bump (got '{}')", perturbation));
  check(perturbation == "bump" || !(eps0 > 0.0), "initial.eps0 > 0 requires perturbation = bump");
  check(bump_width > 0.0, "initial.bump_width must be positive");
  check(dt > 0.0, "evolution.dt must be positive");
  check(!t_end || *t_end >= 0.0, "evolution.t_end must be non-negative");
  check(horizon > 0.0, "evolution.horizon must be positive");
  check(stride >= 1, "evolution.stride must be at least 1");
  check(mass_tolerance > 0.0 && energy_tolerance > 0.0, "evolution drift tolerances must be positive");
  check(tolerance > 0.0, "tracking.tolerance must be positive");
  check(max_iterations >= 1, "tracking.max_iterations must be at least 1");
  check(trust > 0.0, "tracking.trust must be positive");
  check(k_max >= 1 && k_max <= 8, "certification.k_max must lie in 1..8");
  check(coercivity_points >= 32, "certification.coercivity_points must be at least 32");
  check(radial_points >= 64 && radial_points % 2 == 0, "certification.radial_points must be even and >= 64");
  check(snapshot_stride >= 0, "output.snapshot_stride must be non-negative");
  if (errs.empty()) {
    try {
      const auto s0 = sigma0();
      const double margin = 10.0 / std::sqrt(mu);
      for (int j = 0; j < dim; ++j)
        check(std::abs(s0.a[j]) + margin < half_extent,
              fmt::format("initial.a: |a_{}| = {:.6g} plus the margin 10/sqrt(mu) = {:.6g} exceeds half_extent {}", j,
                          std::abs(s0.a[j]), margin, half_extent));
      if (!t_end) (void)resolved_t_end();
    } catch (const Error& e) {
      errs.push_back(e.what());
    }
  }
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
}

std::string ExperimentConfig::to_ini() const {
  std::string s;
  s += fmt::format("[grid]\ndim = {}\nn = {}\nhalf_extent = {:.17g}\n\n", dim, n, half_extent);
  s += fmt::format("[nonlinearity]\nlaw = {}\ns = {:.17g}\nlambda = {:.17g}\nstrength = {:.17g}\nwidth = {:.17g}\n\n", law,
                   this->s, lambda, strength, width);
  s += fmt::format("[potential]\nfamily = {}\n", family);
  if (eps_V) s += fmt::format("eps_V = {}\n", fmt_opt(eps_V));
  if (rate) s += fmt::format("rate = {}\n", fmt_opt(rate));
  s += fmt::format("amplitude = {:.17g}\nvalue = {:.17g}\n\n", amplitude, value);
  s += "[initial]\n";
  if (a_phase)
    s += fmt::format("a_phase = {:.17g}\n", *a_phase);
  else
    s += dim == 1 ? fmt::format("a = {:.17g}\n", a[0]) : fmt::format("a = {:.17g} {:.17g}\n", a[0], a[1]);
  s += dim == 1 ? fmt::format("v = {:.17g}\n", v[0]) : fmt::format("v = {:.17g} {:.17g}\n", v[0], v[1]);
  s += fmt::format("gamma = {:.17g}\nmu = {:.17g}\nperturbation = {}\neps0 = {:.17g}\nbump_width = {:.17g}\nbump_offset = {:.17g}\n\n",
                   gamma, mu, perturbation, eps0, bump_width, bump_offset);
  s += fmt::format("[evolution]\ndt = {:.17g}\n", dt);
  if (t_end) s += fmt::format("t_end = {:.17g}\n", *t_end);
  s += fmt::format(
      "horizon = {:.17g}\nstride = {}\ndealias = {}\nmass_tolerance = {:.17g}\nenergy_tolerance = {:.17g}\ncompare_time = {:.17g}\n\n",
      horizon, stride, dealias ? "true" : "false", mass_tolerance, energy_tolerance, compare_time);
  s += fmt::format("[tracking]\ntolerance = {:.17g}\nmax_iterations = {}\ntrust = {:.17g}\n\n", tolerance, max_iterations,
                   trust);
  s += fmt::format("[interval]\nmu_lo = {:.17g}\nmu_hi = {:.17g}\n\n", mu_lo, mu_hi);
  s += fmt::format("[certification]\nk_max = {}\ncoercivity_points = {}\nradial_points = {}\n\n", k_max,
                   coercivity_points, radial_points);
  s += fmt::format("[output]\ndir = {}\nseed = {}\nsnapshot_stride = {}\n", out_dir, seed, snapshot_stride);
  return s;
}

ExperimentConfig parse_config(const std::string& text, bool strict, std::vector<std::string>* warnings) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config parse error: {}", e.what()));
  }
  ExperimentConfig c;
  std::vector<std::string> unknown;
  for (const auto& [section, body] : tree) {
    const auto sec = known_keys().find(section);
    if (sec == known_keys().end()) {
      if (!body.empty() || body.data().empty()) unknown.push_back(fmt::format("[{}]", section));
      continue;
    }
    for (const auto& [key, node] : body) {
      const std::string raw = trim(node.data());
      const std::string name = section + "." + key;
      if (!sec->second.count(key)) {
        unknown.push_back(name);
        continue;
      }
      if (section == "grid") {
        if (key == "dim") c.dim = static_cast<int>(to_long(name, raw));
        if (key == "n") c.n = static_cast<int>(to_long(name, raw));
        if (key == "half_extent") c.half_extent = to_double(name, raw);
      } else if (section == "nonlinearity") {
        if (key == "law") c.law = raw;
        if (key == "s") c.s = to_double(name, raw);
        if (key == "lambda") c.lambda = to_double(name, raw);
        if (key == "strength") c.strength = to_double(name, raw);
        if (key == "width") c.width = to_double(name, raw);
      } else if (section == "potential") {
        if (key == "family") c.family = raw;
        if (key == "eps_V") c.eps_V = to_double(name, raw);
        if (key == "amplitude") c.amplitude = to_double(name, raw);
        if (key == "rate") c.rate = to_double(name, raw);
        if (key == "value") c.value = to_double(name, raw);
      } else if (section == "initial") {
        if (key == "a") c.a = to_pair(name, raw);
        if (key == "a_phase") c.a_phase = to_double(name, raw);
        if (key == "v") c.v = to_pair(name, raw);
        if (key == "gamma") c.gamma = to_double(name, raw);
        if (key == "mu") c.mu = to_double(name, raw);
        if (key == "perturbation") c.perturbation = raw;
        if (key == "eps0") c.eps0 = to_double(name, raw);
        if (key == "bump_width") c.bump_width = to_double(name, raw);
        if (key == "bump_offset") c.bump_offset = to_double(name, raw);
      } else if (section == "evolution") {
        if (key == "dt") c.dt = to_double(name, raw);
        if (key == "t_end") c.t_end = to_double(name, raw);
        if (key == "horizon") c.horizon = to_double(name, raw);
        if (key == "stride") c.stride = static_cast<int>(to_long(name, raw));
        if (key == "dealias") c.dealias = to_bool(name, raw);
        if (key == "mass_tolerance") c.mass_tolerance = to_double(name, raw);
        if (key == "energy_tolerance") c.energy_tolerance = to_double(name, raw);
        if (key == "compare_time") c.compare_time = to_double(name, raw);
      } else if (section == "tracking") {
        if (key == "tolerance") c.tolerance = to_double(name, raw);
        if (key == "max_iterations") c.max_iterations = static_cast<int>(to_long(name, raw));
        if (key == "trust") c.trust = to_double(name, raw);
      } else if (section == "interval") {
        if (key == "mu_lo") c.mu_lo = to_double(name, raw);
        if (key == "mu_hi") c.mu_hi = to_double(name, raw);
      } else if (section == "certification") {
        if (key == "k_max") c.k_max = static_cast<int>(to_long(name, raw));
        if (key == "coercivity_points") c.coercivity_points = static_cast<int>(to_long(name, raw));
        if (key == "radial_points") c.radial_points = static_cast<int>(to_long(name, raw));
      } else if (section == "output") {
        if (key == "dir") c.out_dir = raw;
        if (key == "seed") c.seed = static_cast<unsigned long>(to_long(name, raw));
        if (key == "snapshot_stride") c.snapshot_stride = static_cast<int>(to_long(name, raw));
      }
    }
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    if (strict) throw ConfigError("unknown configuration keys: " + list);
    if (warnings) warnings->push_back("ignored unknown keys: " + list);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, bool strict, std::vector<std::string>* warnings) {
  std::ifstream is(path);
  if (!is) throw ConfigError(fmt::format("cannot open config file {}", path));
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), strict, warnings);
}

void set_parameter(ExperimentConfig& cfg, const std::string& name, double value) {
  if (name == "eps_V") {
    if (cfg.family != "cosine" && cfg.family != "gaussian_well")
      throw ConfigError("sweep over eps_V needs a cosine or gaussian_well potential");
    cfg.eps_V = value;
    cfg.rate.reset();
  } else if (name == "eps_0") {
    cfg.eps0 = value;
    if (value > 0.0) cfg.perturbation = "bump";
  } else if (name == "dt") {
    cfg.dt = value;
  } else {
    throw ConfigError(fmt::format("unknown sweep parameter '{}' (expected eps_V, eps_0 or dt)", name));
  }
  cfg.validate();
}

}  // namespace nlsdyn
