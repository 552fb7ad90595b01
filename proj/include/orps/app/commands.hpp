#pragma once
// Subcommands of the orps executable. Each returns the process exit code:
// 0 ok, 1 bad input (config or trajectory file), 2 no convergence,
// 3 assumption failure, 4 singular gap, 5 validation failure, 6 other error.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace orps::app {

enum ExitCode : int {
  exit_ok = 0,
  exit_input = 1,
  exit_no_convergence = 2,
  exit_assumption = 3,
  exit_singular_gap = 4,
  exit_validation = 5,
  exit_internal = 6,
};

struct CommandOptions {
  std::string config;  // path, or "catalog:NAME"
  std::string out = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool force = false;
  int iterate_only = 0;            // solve: fixed number of Picard passes when > 0
  std::string trajectory;          // verify
  std::vector<std::string> params; // sweep: "PATH=v1,v2,..."
  std::string sweep_spec;          // sweep: JSON file {"PATH": [values], ...}
};

int cmd_solve(const CommandOptions& opt);
int cmd_bounds(const CommandOptions& opt);
int cmd_verify(const CommandOptions& opt);
int cmd_sweep(const CommandOptions& opt);
/// Lists the catalog; with --out also writes NAME.json for each entry.
int cmd_catalog(const CommandOptions& opt);

/// Configuration named by a path or "catalog:NAME"; throws Error(ConfigParse).
nlohmann::json resolve_config(const std::string& config);

}  // namespace orps::app
