#pragma once
// JSON problem configuration (schema 1) and its translation to a SystemSpec.

#include "orps/solver.hpp"
#include "orps/verifier.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace orps::app {

struct Settings {
  PicardConfig picard{};
  double assumption_tol = 1e-8;
  int assumption_samples = 64;
  ValidationConfig validation{};
  double nu = 10.0;
  std::uint64_t seed = 1;
};

struct LoadedProblem {
  std::string name;
  SystemSpec sys;
  Settings settings;
  nlohmann::json source;
};

/// Parses and validates; failures are Error(ConfigParse) naming the field.
LoadedProblem load_problem(const nlohmann::json& cfg);

/// Reads a file; JSON syntax errors report line and column.
nlohmann::json read_config_file(const std::string& path);

}  // namespace orps::app
