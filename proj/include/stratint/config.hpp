#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratint/funcs.hpp"

namespace stratint {

inline constexpr std::size_t kMaxOrder = 10;

// Configuration problems carry the offending field so the CLI can point at it.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& what_)
      : std::runtime_error(field_ + ": " + what_), field(std::move(field_)) {}
};

enum class PathFamily { Polygonal, Transport };

struct ExperimentConfig {
  PathFamily family = PathFamily::Polygonal;
  double horizon = 1.0;
  std::vector<FunctionSpec> functions;
  std::size_t grid = 1 << 14;      // Brownian steps N (polygonal family)
  double delta = 0.0;              // refinement mesh; 0 means horizon / 2^14
  std::vector<double> m_values;    // approximation levels, ascending
  std::size_t num_paths = 0;
  std::uint64_t master_seed = 0;
  std::string output = "convergence.csv";

  double effective_delta() const {
    return delta > 0.0 ? delta : horizon / static_cast<double>(1 << 14);
  }
};

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    const std::string family = j.at("family").get<std::string>();
    if (family == "polygonal")
      cfg.family = PathFamily::Polygonal;
    else if (family == "transport")
      cfg.family = PathFamily::Transport;
    else
      throw ConfigError("family", "must be \"polygonal\" or \"transport\"");
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("family", "missing or not a string");
  }

  try {
    cfg.horizon = j.at("horizon").get<double>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("horizon", "missing or not a number");
  }
  if (!(cfg.horizon > 0.0)) throw ConfigError("horizon", "must be positive");

  try {
    cfg.functions = j.at("functions").get<std::vector<FunctionSpec>>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("functions", e.what());
  }
  if (cfg.functions.empty()) throw ConfigError("functions", "must be non-empty");
  if (cfg.functions.size() > kMaxOrder)
    throw ConfigError("functions", "order capped at 10");

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_number_integer() || g.get<long long>() < 1)
      throw ConfigError("grid", "must be a positive integer");
    cfg.grid = g.get<std::size_t>();
  }

  if (j.contains("delta")) {
    try {
      cfg.delta = j.at("delta").get<double>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("delta", "not a number");
    }
    if (!(cfg.delta > 0.0)) throw ConfigError("delta", "must be positive");
  }

  try {
    cfg.m_values = j.at("m_values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("m_values", "missing or not an array of numbers");
  }
  if (cfg.m_values.empty()) throw ConfigError("m_values", "must be non-empty");
  std::sort(cfg.m_values.begin(), cfg.m_values.end());
  cfg.m_values.erase(std::unique(cfg.m_values.begin(), cfg.m_values.end()),
                     cfg.m_values.end());
  for (double m : cfg.m_values) {
    if (!(m > 0.0)) throw ConfigError("m_values", "entries must be positive");
    if (cfg.family == PathFamily::Polygonal) {
      const double r = std::round(m);
      if (std::abs(m - r) > 0.0)
        throw ConfigError("m_values", "polygonal family needs integer m");
      if (cfg.grid % static_cast<std::size_t>(r) != 0)
        throw ConfigError("m_values", "each m must divide grid");
    }
  }

  try {
    const auto& p = j.at("num_paths");
    if (!p.is_number_integer() || p.get<long long>() < 1)
      throw ConfigError("num_paths", "must be a positive integer");
    cfg.num_paths = p.get<std::size_t>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("num_paths", "missing or not an integer");
  }

  try {
    const auto& s = j.at("master_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("master_seed", "must be a non-negative integer");
    cfg.master_seed = s.get<std::uint64_t>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("master_seed", "missing or not an integer");
  }

  if (j.contains("output")) {
    try {
      cfg.output = j.at("output").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("output", "not a string");
    }
    if (cfg.output.empty()) throw ConfigError("output", "must be non-empty");
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_experiment_config(j);
}

// Calibrated discretization tolerances. `agreement` bounds the pairwise gap
// between the Stratonovich evaluation methods at grid size N,
// tol(N) = coeff * N^exponent; `chain_rule` scales the delta^2 bound on the
// ordinary-side closed-form comparison. Values live in config/tolerance.json
// next to the calibration notes that produced them.
struct ToleranceSchedule {
  double agreement_coeff = 0.0;
  double agreement_exponent = -0.5;
  double chain_rule_coeff = 0.0;

  double tol(std::size_t grid) const {
    return agreement_coeff * std::pow(static_cast<double>(grid), agreement_exponent);
  }
};

inline ToleranceSchedule load_tolerance_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("tolerance", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("tolerance", std::string("invalid JSON: ") + e.what());
  }
  ToleranceSchedule ts;
  try {
    ts.agreement_coeff = j.at("agreement").at("coeff").get<double>();
    ts.agreement_exponent = j.at("agreement").at("exponent").get<double>();
    ts.chain_rule_coeff = j.at("chain_rule").at("coeff").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("tolerance", std::string("missing field: ") + e.what());
  }
  if (!(ts.agreement_coeff > 0.0))
    throw ConfigError("tolerance", "agreement.coeff must be positive");
  if (!(ts.chain_rule_coeff > 0.0))
    throw ConfigError("tolerance", "chain_rule.coeff must be positive");
  return ts;
}

}  // namespace stratint
