// orps solve|bounds|verify|sweep|catalog
#include "orps/app/commands.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("orps");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ORPS_LOG")) {
    const std::string v(env);
    if (v == "error") spdlog::set_level(spdlog::level::err);
    else if (v == "warn") spdlog::set_level(spdlog::level::warn);
    else if (v == "info") spdlog::set_level(spdlog::level::info);
    else if (v == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring ORPS_LOG={} (expected error, warn, info or debug)", v);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  using namespace orps::app;
  CommandOptions opt;
  std::uint64_t seed = 0;

  CLI::App app{"Periodic solutions of impulsive integro-differential evolution equations"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "configuration file or catalog:NAME");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the configured seed");
  };
  auto* solve = app.add_subcommand("solve", "solve, validate, write trajectory.csv and report.json");
  common(solve);
  solve->add_flag("--force", opt.force, "continue past failed assumption checks");
  solve->add_option("--iterate-only", opt.iterate_only, "apply R this many times from zero instead of iterating to tolerance")
      ->check(CLI::PositiveNumber);
  auto* bounds = app.add_subcommand("bounds", "write bounds.json with closed-form and numeric kernel bounds");
  common(bounds);
  auto* verify = app.add_subcommand("verify", "validate an external trajectory CSV");
  common(verify);
  verify->add_option("--trajectory", opt.trajectory, "trajectory CSV")->required();
  auto* sweep = app.add_subcommand("sweep", "parameter grid, one solve per point, writes sweep.csv");
  common(sweep);
  sweep->add_option("--jobs", opt.jobs, "concurrent grid points")->check(CLI::PositiveNumber);
  sweep->add_option("--param", opt.params, "JSON pointer or rho_scale, as PATH=v1,v2,...");
  sweep->add_option("--spec", opt.sweep_spec, "JSON file {PATH: [values]}");
  auto* cat = app.add_subcommand("catalog", "list built-in problems; with --out write their configurations");
  cat->add_option("--out", opt.out, "directory for NAME.json files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_input;
  }
  for (auto* sub : {solve, bounds, verify, sweep})
    if (sub->parsed() && sub->count("--seed") > 0) opt.seed = seed;

  if (solve->parsed()) return cmd_solve(opt);
  if (bounds->parsed()) return cmd_bounds(opt);
  if (verify->parsed()) return cmd_verify(opt);
  if (sweep->parsed()) return cmd_sweep(opt);
  return cmd_catalog(opt);
}
