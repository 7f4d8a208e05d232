// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: flat key-value file with [sections], '#'
// comments, comma-separated lists. Schema versioned via `schema_version`.

#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fasisac/baselines.hpp"
#include "fasisac/scenario_gen.hpp"

namespace fasisac {

enum class SweepVariable { Region, Power, Gamma };

inline const char* sweep_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::Region: return "region";
    case SweepVariable::Power: return "power";
    case SweepVariable::Gamma: return "gamma";
  }
  return "?";
}

struct ExperimentConfig {
  // geometry block
  int mx = 8, my = 8;
  int n_rx = 4;
  double lambda = 0.015;
  double spacing = 0.0075;    // d, defaults to lambda/2
  double min_dist = 0.0075;   // D = lambda/2
  double region = 0.03;       // default A when not swept
  std::vector<double> region_list{0.015, 0.03, 0.045, 0.06};  // A in {1..4} lambda

  // population block
  PopulationConfig population;
  std::vector<double> power_list{0.1, 0.2, 0.5, 1.0, 2.0};
  std::vector<double> gamma_list{0.5, 1.0, 2.0, 4.0};

  // run block
  int trials = 50;
  std::uint64_t seed = 1;
  SweepVariable sweep = SweepVariable::Region;
  std::vector<Scheme> schemes{Scheme::Fas, Scheme::Aps, Scheme::Rula, Scheme::Fpa};
  SolverConfig solver;
  int threads = 1;
  std::string output = "results.csv";

  ArrayGeometry geometry(double region_side) const {
    return ArrayGeometry(mx, my, spacing, n_rx, region_side, min_dist, lambda);
  }

  std::vector<double> sweep_values() const {
    switch (sweep) {
      case SweepVariable::Region: return region_list;
      case SweepVariable::Power: return power_list;
      case SweepVariable::Gamma: return gamma_list;
    }
    return {};
  }
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_list(const std::string& value,
                                      const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad number '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

inline double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  }
}

inline long parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + value + "'");
  }
}

}  // namespace detail

inline std::vector<Scheme> parse_schemes(const std::string& value) {
  std::vector<Scheme> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item == "fas") out.push_back(Scheme::Fas);
    else if (item == "aps") out.push_back(Scheme::Aps);
    else if (item == "rula") out.push_back(Scheme::Rula);
    else if (item == "fpa") out.push_back(Scheme::Fpa);
    else if (!item.empty())
      throw ConfigError("config key 'schemes': unknown scheme '" + item + "'");
  }
  if (out.empty()) throw ConfigError("config key 'schemes': empty list");
  return out;
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  bool saw_version = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    using detail::parse_double;
    using detail::parse_int;
    using detail::parse_list;

    if (full == "schema_version") {
      if (parse_int(value, full) != 1)
        throw ConfigError("config key 'schema_version': unsupported version " + value);
      saw_version = true;
    } else if (full == "geometry.mx") cfg.mx = static_cast<int>(parse_int(value, full));
    else if (full == "geometry.my") cfg.my = static_cast<int>(parse_int(value, full));
    else if (full == "geometry.n") cfg.n_rx = static_cast<int>(parse_int(value, full));
    else if (full == "geometry.lambda") cfg.lambda = parse_double(value, full);
    else if (full == "geometry.d") cfg.spacing = parse_double(value, full);
    else if (full == "geometry.min_distance") cfg.min_dist = parse_double(value, full);
    else if (full == "geometry.region") cfg.region = parse_double(value, full);
    else if (full == "geometry.region_sizes") cfg.region_list = parse_list(value, full);
    else if (full == "population.users")
      cfg.population.users = static_cast<int>(parse_int(value, full));
    else if (full == "population.paths")
      cfg.population.paths = static_cast<int>(parse_int(value, full));
    else if (full == "population.clutters")
      cfg.population.clutters = static_cast<int>(parse_int(value, full));
    else if (full == "population.gamma") cfg.population.gamma = parse_double(value, full);
    else if (full == "population.noise_dbm")
      cfg.population.noise_user = dbm_to_watt(parse_double(value, full));
    else if (full == "population.noise0_dbm")
      cfg.population.noise_radar = dbm_to_watt(parse_double(value, full));
    else if (full == "population.power")
      cfg.population.power_budget = parse_double(value, full);
    else if (full == "population.power_budgets") cfg.power_list = parse_list(value, full);
    else if (full == "population.gammas") cfg.gamma_list = parse_list(value, full);
    else if (full == "population.coeff_dist") {
      if (value == "complex") cfg.population.complex_gaussian = true;
      else if (value == "real") cfg.population.complex_gaussian = false;
      else throw ConfigError("config key 'population.coeff_dist': expected complex|real");
    } else if (full == "run.trials")
      cfg.trials = static_cast<int>(parse_int(value, full));
    else if (full == "run.seed")
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, full));
    else if (full == "run.sweep") {
      if (value == "region") cfg.sweep = SweepVariable::Region;
      else if (value == "power") cfg.sweep = SweepVariable::Power;
      else if (value == "gamma") cfg.sweep = SweepVariable::Gamma;
      else throw ConfigError("config key 'run.sweep': expected region|power|gamma");
    } else if (full == "run.schemes") cfg.schemes = parse_schemes(value);
    else if (full == "run.eps") {
      const double eps = parse_double(value, full);
      cfg.solver.eps_outer = cfg.solver.eps_w = eps;
      cfg.solver.eps_r_outer = cfg.solver.eps_r_inner = eps;
    } else if (full == "run.max_outer")
      cfg.solver.max_outer = static_cast<int>(parse_int(value, full));
    else if (full == "run.max_inner")
      cfg.solver.max_inner = static_cast<int>(parse_int(value, full));
    else if (full == "run.qcqp_tol") cfg.solver.qcqp_tol = parse_double(value, full);
    else if (full == "run.threads")
      cfg.threads = static_cast<int>(parse_int(value, full));
    else if (full == "run.output") cfg.output = value;
    else throw ConfigError("unknown config key '" + full + "'");
  }
  if (!saw_version) throw ConfigError("config is missing 'schema_version'");
  if (cfg.trials < 1) throw ConfigError("config key 'run.trials': must be >= 1");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace fasisac
