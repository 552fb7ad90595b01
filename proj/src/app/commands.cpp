#include "orps/app/commands.hpp"

#include "orps/app/catalog.hpp"
#include "orps/app/config.hpp"
#include "orps/app/trajectory_io.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace orps::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path out_dir(const CommandOptions& opt) {
  fs::path dir(opt.out);
  fs::create_directories(dir);
  return dir;
}

LoadedProblem load(const CommandOptions& opt) {
  LoadedProblem lp = load_problem(resolve_config(opt.config));
  if (opt.seed) lp.settings.seed = *opt.seed;
  return lp;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigParse:
    case ErrorCode::SchemaMismatch: return exit_input;
    case ErrorCode::SingularGap: return exit_singular_gap;
    case ErrorCode::NoConvergence: return exit_no_convergence;
    default: return exit_internal;
  }
}

json assumptions_json(const AssumptionReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"id", e.id},
                       {"status", to_string(e.status)},
                       {"residual", number_json(e.residual)},
                       {"tolerance", number_json(e.tolerance)},
                       {"detail", e.detail},
                       {"indices", e.indices}});
  return {{"overall", r.overall ? "pass" : "fail"},
          {"failed", r.failed()},
          {"entries", entries},
          {"a5_stated_residual", number_json(r.a5_stated_residual)},
          {"sampled_L_f", number_json(r.sampled_L_f)},
          {"sampled_L_g", number_json(r.sampled_L_g)},
          {"fitted_alpha", number_json(r.fitted_alpha)},
          {"fitted_beta", number_json(r.fitted_beta)},
          {"growth", {{"M", r.growth.M}, {"gamma", r.growth.gamma}, {"validation_ratio", r.growth.validation_ratio}}}};
}

json bound_json(const BoundReport& b) {
  const auto& in = b.inputs;
  return {{"variant", b.variant == KernelVariant::general ? "general" : "commuting"},
          {"C1", number_json(b.C1)},
          {"C2", number_json(b.C2)},
          {"C1_tight", number_json(b.C1_tight)},
          {"C1_as_stated", number_json(b.C1_as_stated)},
          {"C2_as_stated", number_json(b.C2_as_stated)},
          {"c1_branch", b.c1_branch},
          {"c2_branch", b.c2_branch},
          {"inputs",
           {{"M", in.M},
            {"gamma", in.gamma},
            {"omega", in.omega},
            {"prod_norm", number_json(in.prod_norm)},
            {"prod_sq_norm", number_json(in.prod_sq_norm)},
            {"gap_inv_norm", number_json(in.gap_inv_norm)},
            {"rho_norm", number_json(in.rho_norm)},
            {"window_max", number_json(in.window_max)},
            {"prefix_max", number_json(in.prefix_max)},
            {"suffix_max", number_json(in.suffix_max)},
            {"cyclic_max", number_json(in.cyclic_max)},
            {"d_sum", number_json(in.d_sum)},
            {"d_weighted_sum", number_json(in.d_weighted_sum)}}}};
}

json certificate_json(const Certificate& c) {
  return {{"M", c.M},
          {"gamma", c.gamma},
          {"C1", number_json(c.C1)},
          {"C2", number_json(c.C2)},
          {"nu", c.nu},
          {"L_f", number_json(c.L_f)},
          {"L_g", number_json(c.L_g)},
          {"lipschitz_sampled", c.lipschitz_sampled},
          {"L", number_json(c.L)},
          {"M1", number_json(c.M1)},
          {"f0", number_json(c.f0)},
          {"contraction_ok", c.contraction_ok},
          {"norm_bound", number_json(c.norm_bound)},
          {"nu_consistent", c.nu_consistent},
          {"alpha", number_json(c.alpha)},
          {"beta", number_json(c.beta)},
          {"growth_supplied", c.growth_supplied},
          {"schauder_ok", c.schauder_ok},
          {"ball_radius_l", number_json(c.ball_radius_l)},
          {"stale", c.stale}};
}

json log_json(const ConvergenceLog& log) {
  json records = json::array();
  for (const auto& r : log.records)
    records.push_back({{"level", r.level},
                       {"iteration", r.iteration},
                       {"distance", number_json(r.distance)},
                       {"rate", number_json(r.rate)},
                       {"sup_norm", number_json(r.sup_norm)}});
  return {{"converged", log.converged},
          {"iterations", log.iterations},
          {"applications", log.applications},
          {"levels", log.levels},
          {"panels", log.panels},
          {"final_distance", number_json(log.final_distance)},
          {"level_agreement", number_json(log.level_agreement)},
          {"grid_converged", log.grid_converged},
          {"max_rate", number_json(log.max_rate())},
          {"nu_escaped", log.nu_escaped},
          {"nu_final", log.nu_final},
          {"certificate_stale", log.certificate_stale},
          {"records", records}};
}

json validation_json(const ValidationReport& v) {
  json jr = json::array();
  for (double r : v.jump_residuals) jr.push_back(number_json(r));
  return {{"passed", v.passed},
          {"periodicity_residual", number_json(v.periodicity_residual)},
          {"endpoint_residual", number_json(v.endpoint_residual)},
          {"ode_residual", number_json(v.ode_residual)},
          {"jump_residuals", jr},
          {"bad_jumps", v.bad_jumps}};
}

CertificateConfig certificate_config(const Settings& s) {
  CertificateConfig cc;
  cc.seed = s.seed;
  cc.memory = s.picard.memory;
  return cc;
}

int finish(json& report, const fs::path& path, int code) {
  report["exit_code"] = code;
  write_json(path, report);
  return code;
}

}  // namespace

json resolve_config(const std::string& config) {
  if (config.empty()) throw Error(ErrorCode::ConfigParse, "no configuration given (use --config)");
  const std::string prefix = "catalog:";
  if (config.rfind(prefix, 0) == 0) {
    const auto entry = find_catalog(config.substr(prefix.size()));
    if (!entry) throw Error(ErrorCode::ConfigParse, "unknown catalog problem '" + config.substr(prefix.size()) + "'");
    return entry->config;
  }
  return read_config_file(config);
}

int cmd_solve(const CommandOptions& opt) {
  json report{{"schema", 1}, {"command", "solve"}};
  fs::path report_path;
  try {
    const LoadedProblem lp = load(opt);
    const SystemSpec& sys = lp.sys;
    const Settings& s = lp.settings;
    const fs::path dir = out_dir(opt);
    report_path = dir / "report.json";
    report["problem"] = lp.name;
    report["seed"] = s.seed;
    report["dimension"] = sys.dim();
    report["linear"] = sys.is_linear();

    const AssumptionReport assumptions = check_assumptions(sys, s.assumption_tol, s.assumption_samples, s.seed);
    report["assumptions"] = assumptions_json(assumptions);
    if (!assumptions.overall) {
      spdlog::warn("assumption check failed: {}", json(assumptions.failed()).dump());
      if (!opt.force) {
        report["status"] = "assumption-failure";
        return finish(report, report_path, exit_assumption);
      }
    }

    try {
      const Certificate cert = contraction_certificate(sys, s.nu, certificate_config(s));
      report["certificate"] = certificate_json(cert);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SingularGap) throw;
      report["certificate"] = {{"error", e.what()}};
    }

    PiecewiseTrajectory solution;
    if (opt.iterate_only > 0) {
      PicardConfig pc = s.picard;
      const PicardOperator R(sys, pc.grid, pc.quad_nodes, pc.memory);
      PiecewiseTrajectory y = R.sample([&](int, double) { return Vector(Vector::Zero(sys.dim())); });
      for (int i = 0; i < opt.iterate_only; ++i) y = R.apply(y);
      solution = std::move(y);
      report["iterate_only"] = opt.iterate_only;
    } else {
      try {
        PicardResult res = solve_semilinear_picard(sys, s.picard);
        report["convergence"] = log_json(res.log);
        solution = std::move(res.solution);
      } catch (const NoConvergence& e) {
        spdlog::error("{}", e.what());
        report["convergence"] = log_json(e.log());
        report["status"] = "no-convergence";
        return finish(report, report_path, exit_no_convergence);
      }
    }

    const ValidationReport val = validate_solution(sys, solution, s.validation);
    report["validation"] = validation_json(val);
    write_trajectory_csv((dir / "trajectory.csv").string(), solution);
    report["status"] = val.passed ? "ok" : "validation-failure";
    return finish(report, report_path, val.passed ? exit_ok : exit_validation);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    std::cerr << "orps solve: " << e.what() << '\n';
    if (report_path.empty()) return exit_for(e);
    report["status"] = "error";
    report["error"] = e.what();
    return finish(report, report_path, exit_for(e));
  }
}

int cmd_bounds(const CommandOptions& opt) {
  try {
    const LoadedProblem lp = load(opt);
    const SystemSpec& sys = lp.sys;
    const fs::path dir = out_dir(opt);
    const double w = sys.omega();
    const GrowthEstimate growth = estimate_growth(sys.A, w, 256);
    const PeriodicKernel kernel(sys);  // SingularGap surfaces here

    bool commuting = true;
    const double tol = lp.settings.assumption_tol;
    for (const auto& imp : sys.schedule.impulses()) {
      commuting = commuting && check_commute(sys.A, imp.B, tol).commute && check_commute(sys.rho(), imp.B, tol).commute;
      for (const auto& other : sys.schedule.impulses()) commuting = commuting && check_commute(imp.B, other.B, tol).commute;
    }
    commuting = commuting && check_commute(sys.rho(), sys.A, tol).commute;

    json out{{"schema", 1}, {"command", "bounds"}, {"problem", lp.name}, {"commuting", commuting}};
    out["growth"] = {{"M", growth.M}, {"gamma", growth.gamma}, {"validation_ratio", growth.validation_ratio}};
    constexpr int grid = 64;
    const QuadratureConfig quad{};
    auto numeric = [&](KernelVariant v, const BoundReport& b) {
      double imax = 0.0, smax = 0.0;
      for (int i = 0; i < grid; ++i) {
        const double t = w * i / (grid - 1);
        imax = std::max(imax, kernel_integral_numeric(kernel, t, quad, v));
        smax = std::max(smax, kernel_sum_numeric(kernel, t, v));
      }
      json j = bound_json(b);
      j["numeric"] = {{"t_grid", grid}, {"integral_max", imax}, {"sum_max", smax}};
      j["margin"] = {{"C2", number_json(b.C2 - imax)},
                     {"C1", number_json(b.C1 - smax)},
                     {"C2_as_stated", number_json(b.C2_as_stated - imax)},
                     {"C1_as_stated", number_json(b.C1_as_stated - smax)}};
      return j;
    };
    out["general"] = numeric(KernelVariant::general, bound_general(sys, growth));
    // The commuting closed forms are reported regardless; the numeric side
    // uses the commuting kernel, which represents H only under commutation.
    out["commuting_bounds"] = numeric(KernelVariant::commuting, bound_commuting(sys, growth));
    write_json(dir / "bounds.json", out);
    return exit_ok;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    std::cerr << "orps bounds: " << e.what() << '\n';
    return exit_for(e);
  }
}

int cmd_verify(const CommandOptions& opt) {
  try {
    const LoadedProblem lp = load(opt);
    if (opt.trajectory.empty()) throw Error(ErrorCode::SchemaMismatch, "verify needs --trajectory");
    const PiecewiseTrajectory traj = read_trajectory_csv(opt.trajectory);
    if (traj.dim() != lp.sys.dim())
      throw Error(ErrorCode::SchemaMismatch, "trajectory has " + std::to_string(traj.dim()) + " components, problem has " +
                                                 std::to_string(lp.sys.dim()));
    const ValidationReport val = validate_solution(lp.sys, traj, lp.settings.validation);
    json out{{"schema", 1}, {"command", "verify"}, {"problem", lp.name}, {"validation", validation_json(val)}};
    out["exit_code"] = val.passed ? exit_ok : exit_validation;
    write_json(out_dir(opt) / "verify.json", out);
    if (val.passed) {
      std::cout << "PASS periodicity=" << format_double(val.periodicity_residual)
                << " ode=" << format_double(val.ode_residual) << '\n';
      return exit_ok;
    }
    std::cout << "FAIL periodicity=" << format_double(val.periodicity_residual)
              << " endpoint=" << format_double(val.endpoint_residual) << " ode=" << format_double(val.ode_residual);
    for (int k : val.bad_jumps) std::cout << " bad-impulse=" << k;
    std::cout << '\n';
    return exit_validation;
  } catch (const Error& e) {
    std::cerr << "orps verify: " << e.what() << '\n';
    return exit_for(e);
  }
}

namespace {

struct Axis {
  std::string path;  // JSON pointer, or "rho_scale"
  std::vector<double> values;
};

std::vector<Axis> sweep_axes(const CommandOptions& opt) {
  std::vector<Axis> axes;
  for (const auto& p : opt.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ConfigParse, "sweep parameter '" + p + "' must be PATH=v1,v2,...");
    Axis a{p.substr(0, eq), {}};
    std::stringstream ss(p.substr(eq + 1));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        a.values.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigParse, "sweep value '" + cell + "' is not a number");
      }
    }
    axes.push_back(std::move(a));
  }
  if (!opt.sweep_spec.empty()) {
    const json spec = read_config_file(opt.sweep_spec);
    if (!spec.is_object()) throw Error(ErrorCode::ConfigParse, "sweep spec must be an object of PATH: [values]");
    for (const auto& [key, vals] : spec.items()) {
      if (!vals.is_array() || vals.empty()) throw Error(ErrorCode::ConfigParse, "sweep spec '" + key + "' needs a value list");
      Axis a{key, {}};
      for (const auto& v : vals) {
        if (!v.is_number()) throw Error(ErrorCode::ConfigParse, "sweep spec '" + key + "' has a non-numeric value");
        a.values.push_back(v.get<double>());
      }
      axes.push_back(std::move(a));
    }
  }
  if (axes.empty()) throw Error(ErrorCode::ConfigParse, "sweep needs at least one --param or --spec");
  for (const auto& a : axes)
    if (a.values.empty()) throw Error(ErrorCode::ConfigParse, "sweep axis '" + a.path + "' is empty");
  return axes;
}

void apply_axis(json& cfg, const std::string& path, double v) {
  if (path == "rho_scale") {
    for (auto& row : cfg.at("rho"))
      for (auto& x : row) x = x.get<double>() * v;
    return;
  }
  try {
    cfg[json::json_pointer(path)] = v;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigParse, "sweep path '" + path + "': " + e.what());
  }
}

struct SweepRow {
  double LC2 = std::numeric_limits<double>::quiet_NaN();
  double betaC2 = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iterations = 0;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

SweepRow sweep_point(const json& cfg, const CommandOptions& opt) {
  SweepRow row;
  try {
    LoadedProblem lp = load_problem(cfg);
    if (opt.seed) lp.settings.seed = *opt.seed;
    try {
      const Certificate c = contraction_certificate(lp.sys, lp.settings.nu, certificate_config(lp.settings));
      row.LC2 = c.L * c.C2;
      row.betaC2 = c.beta * c.C2;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SingularGap) throw;
      row.error = e.what();
    }
    try {
      const PicardResult res = solve_semilinear_picard(lp.sys, lp.settings.picard);
      row.converged = res.log.converged;
      row.iterations = res.log.iterations;
      row.final_residual = res.log.final_distance;
    } catch (const NoConvergence& e) {
      row.converged = false;
      row.iterations = e.log().iterations;
      row.final_residual = e.log().final_distance;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }

}  // namespace

int cmd_sweep(const CommandOptions& opt) {
  try {
    const json base = resolve_config(opt.config);
    load_problem(base);  // reject a bad base configuration up front
    const std::vector<Axis> axes = sweep_axes(opt);
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();

    // Row-major cartesian product, last axis fastest.
    std::vector<std::vector<double>> points(total);
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rem = i;
      points[i].resize(axes.size());
      for (std::size_t k = axes.size(); k-- > 0;) {
        points[i][k] = axes[k].values[rem % axes[k].values.size()];
        rem /= axes[k].values.size();
      }
    }
    std::vector<json> configs(total, base);
    for (std::size_t i = 0; i < total; ++i)
      for (std::size_t k = 0; k < axes.size(); ++k) apply_axis(configs[i], axes[k].path, points[i][k]);

    std::vector<SweepRow> rows(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < total; i = next++) rows[i] = sweep_point(configs[i], opt);
    };
    const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(total)));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ofstream out(out_dir(opt) / "sweep.csv", std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write sweep.csv");
    for (const auto& a : axes) out << a.path << ',';
    out << "LC2,betaC2,converged,iterations,final_residual\n";
    for (std::size_t i = 0; i < total; ++i) {
      for (double v : points[i]) out << format_double(v) << ',';
      const auto& r = rows[i];
      out << csv_number(r.LC2) << ',' << csv_number(r.betaC2) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations
          << ',' << csv_number(r.final_residual) << '\n';
      if (!r.error.empty()) spdlog::warn("sweep point {}: {}", i, r.error);
    }
    return exit_ok;
  } catch (const Error& e) {
    std::cerr << "orps sweep: " << e.what() << '\n';
    return exit_for(e);
  }
}

int cmd_catalog(const CommandOptions& opt) {
  const bool write = opt.out != ".";
  if (write) fs::create_directories(opt.out);
  for (const auto& e : catalog()) {
    std::cout << e.name << "  " << e.description << '\n';
    if (write) write_json(fs::path(opt.out) / (e.name + ".json"), e.config);
  }
  return exit_ok;
}

}  // namespace orps::app
