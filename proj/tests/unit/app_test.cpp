#include "orps/app/catalog.hpp"
#include "orps/app/commands.hpp"
#include "orps/app/config.hpp"
#include "orps/app/expression.hpp"
#include "orps/app/trajectory_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace orps;
using namespace orps::app;
using nlohmann::json;

namespace {

std::string message_of(const json& cfg) {
  try {
    load_problem(cfg);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigParse);
    return e.what();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("orps_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST_CASE("expressions") {
  Vector y(2), z(2);
  y << 1.5, -2.0;
  z << 0.25, 4.0;
  CHECK(Expression::parse("1 + 2 * 3", 0)(0, y, z) == 7.0);
  CHECK(Expression::parse("-(t - 1) / 2", 0)(3.0, y, z) == -1.0);
  CHECK(Expression::parse("y1 * z2 + y2", 2)(0, y, z) == 4.0);
  CHECK(Expression::parse("sin(pi * t) + cos(0) + exp(0)", 0)(0.5, y, z) == doctest::Approx(3.0));
  CHECK(Expression::parse("s * y1", 2, true)(0, y, z, 2.0) == 3.0);
  CHECK(Expression::parse("2e-1", 0)(0, y, z) == doctest::Approx(0.2));
  CHECK_THROWS_AS(Expression::parse("y3", 2), Error);
  CHECK_THROWS_AS(Expression::parse("s", 2), Error);
  CHECK_THROWS_AS(Expression::parse("1 +", 0), Error);
  CHECK_THROWS_AS(Expression::parse("log(2)", 0), Error);
  CHECK_THROWS_AS(Expression::parse("(1", 0), Error);
}

TEST_CASE("configuration errors name the field") {
  json cfg = find_catalog("scalar-impulse")->config;
  CHECK(message_of(cfg).empty());
  json a = cfg;
  a["schema"] = 2;
  CHECK(message_of(a).find("schema") != std::string::npos);
  json b = cfg;
  b["A"] = json::array({json::array({1, 2})});
  CHECK(message_of(b).find("A[0]") != std::string::npos);
  json c = cfg;
  c["impulses"][0]["tau"] = "half";
  CHECK(message_of(c).find("impulses[0].tau") != std::string::npos);
  json d = cfg;
  d["nonlinearity"] = {{"kind", "expression"}, {"f", {"y1 +"}}};
  CHECK(message_of(d).find("nonlinearity.f[0]") != std::string::npos);
  json e = cfg;
  e["solver"] = {{"volterra_arg", "middle"}};
  CHECK(message_of(e).find("solver.volterra_arg") != std::string::npos);
  json f = cfg;
  f["impulses"][0]["tau"] = 1.5;
  CHECK(message_of(f).find("invalid problem data") != std::string::npos);
}

TEST_CASE("configuration files report line and column of syntax errors") {
  const auto dir = scratch("syntax");
  const auto path = dir / "bad.json";
  std::ofstream(path) << "{\n  \"schema\": 1,\n  \"dimension\": ,\n}\n";
  try {
    read_config_file(path.string());
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("nonlinearity kinds build working systems") {
  json cfg = find_catalog("scalar-sine")->config;
  cfg["nonlinearity"] = {{"kind", "polynomial"},
                         {"f", {{"const", {1.0}}, {"y", {{0.5}}}, {"z", {{0.25}}}, {"yy", {{{2.0}}}}}},
                         {"g", {{"y", {{1.0}}}}}};
  auto lp = load_problem(cfg);
  REQUIRE(lp.sys.problem);
  const Vector y = Vector::Constant(1, 2.0), z = Vector::Constant(1, 4.0);
  CHECK(lp.sys.problem->f(0.0, y, z)(0) == doctest::Approx(1.0 + 1.0 + 1.0 + 8.0));
  CHECK(lp.sys.problem->g(0.0, 0.5, y)(0) == 2.0);

  cfg["nonlinearity"] = {{"kind", "expression"}, {"f", {"y1 * z1 + t"}}, {"g", {"s * y1"}}, {"lipschitz_f", 0.5}};
  cfg["solver"] = {{"volterra_arg", "at_s"}};
  lp = load_problem(cfg);
  CHECK(lp.sys.problem->f(1.0, y, z)(0) == 9.0);
  CHECK(lp.sys.problem->g(0.0, 0.5, y)(0) == 1.0);
  CHECK(*lp.sys.problem->lipschitz_f == 0.5);
  CHECK(lp.sys.problem->volterra_arg == VolterraArg::at_s);
}

TEST_CASE("catalog problems load") {
  for (const auto& e : catalog()) {
    const auto lp = load_problem(e.config);
    CHECK(lp.name == e.name);
  }
}

TEST_CASE("trajectory CSV round-trip and schema errors") {
  const auto lp = load_problem(find_catalog("scalar-impulse")->config);
  const auto y = solve_linear_periodic(lp.sys);
  std::stringstream ss;
  write_trajectory_csv(ss, y);
  const std::string text = ss.str();
  CHECK(text.rfind("t,side,y_1\n", 0) == 0);
  std::stringstream in(text);
  const auto back = read_trajectory_csv(in);
  std::stringstream again;
  write_trajectory_csv(again, back);
  CHECK(again.str() == text);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");

  auto bad = [](const std::string& s) {
    std::stringstream b(s);
    try {
      read_trajectory_csv(b);
    } catch (const Error& e) {
      return e.code() == ErrorCode::SchemaMismatch;
    }
    return false;
  };
  CHECK(bad(""));
  CHECK(bad("time,side,y_1\n0,-,1\n"));
  CHECK(bad("t,side,y_1\n0,-,1,2\n"));
  CHECK(bad("t,side,y_1\n0,X,1\n"));
  CHECK(bad("t,side,y_1\n0,-,abc\n"));
  CHECK(bad("t,side,y_1\n0,-,1\n0.5,L,1\n1,-,2\n"));
}

TEST_CASE("solve command") {
  SUBCASE("closed-form catalog problem") {
    const auto dir = scratch("solve_rho2");
    CommandOptions opt;
    opt.config = "catalog:scalar-rho2-forced";
    opt.out = dir.string();
    CHECK(cmd_solve(opt) == exit_ok);
    const auto y = read_trajectory_csv((dir / "trajectory.csv").string());
    for (const auto& s : y.samples()) CHECK(std::abs(s.y(0) - (1.0 + s.t)) <= 1e-8 * (1.0 + s.t));
    const json rep = read_json(dir / "report.json");
    CHECK(rep["status"] == "ok");
    CHECK(rep["exit_code"] == 0);
  }
  SUBCASE("singular gap stops at the assumption check") {
    const auto dir = scratch("solve_gap");
    CommandOptions opt;
    opt.config = "catalog:gap-singular";
    opt.out = dir.string();
    CHECK(cmd_solve(opt) == exit_assumption);
    const json rep = read_json(dir / "report.json");
    CHECK(rep["assumptions"]["failed"] == json::array({"A4"}));
    opt.force = true;
    CHECK(cmd_solve(opt) == exit_singular_gap);
  }
  SUBCASE("one pass on a linear problem equals the full solve") {
    const auto dir = scratch("solve_once");
    CommandOptions opt;
    opt.config = "catalog:commuting-family";
    opt.out = (dir / "full").string();
    CHECK(cmd_solve(opt) == exit_ok);
    opt.out = (dir / "once").string();
    opt.iterate_only = 1;
    CHECK(cmd_solve(opt) == exit_ok);
    const auto full = read_trajectory_csv((dir / "full" / "trajectory.csv").string());
    const auto once = read_trajectory_csv((dir / "once" / "trajectory.csv").string());
    for (const auto& s : once.samples()) {
      const Vector ref = s.side == 'R' ? full.right_limit(s.t) : full.value(s.t);
      CHECK((s.y - ref).norm() <= 1e-10 * (1.0 + ref.norm()));
    }
  }
  SUBCASE("missing file and bad catalog name") {
    CommandOptions opt;
    opt.config = "/nonexistent/config.json";
    CHECK(cmd_solve(opt) == exit_input);
    opt.config = "catalog:nope";
    CHECK(cmd_solve(opt) == exit_input);
  }
}

TEST_CASE("bounds command") {
  const auto dir = scratch("bounds");
  CommandOptions opt;
  opt.config = "catalog:scalar-rho2-forced";
  opt.out = dir.string();
  CHECK(cmd_bounds(opt) == exit_ok);
  const json b = read_json(dir / "bounds.json");
  CHECK(b["general"]["C2"].get<double>() == doctest::Approx(2.0));
  CHECK(b["general"]["numeric"]["integral_max"].get<double>() == doctest::Approx(2.0));
  CHECK(std::abs(b["general"]["margin"]["C2"].get<double>()) <= 1e-12);
  CHECK(b["general"]["C1"].get<double>() == 0.0);
  CHECK(b["commuting_bounds"]["C2"].get<double>() == doctest::Approx(2.0));

  opt.config = "catalog:gap-singular";
  CHECK(cmd_bounds(opt) == exit_singular_gap);
}

TEST_CASE("verify command") {
  const auto dir = scratch("verify");
  CommandOptions opt;
  opt.config = "catalog:scalar-softabs";
  opt.out = dir.string();
  REQUIRE(cmd_solve(opt) == exit_ok);
  opt.trajectory = (dir / "trajectory.csv").string();
  CHECK(cmd_verify(opt) == exit_ok);

  // Edit the right limit of the single jump.
  std::ifstream in(opt.trajectory);
  std::stringstream text;
  text << in.rdbuf();
  std::string csv = text.str();
  const auto pos = csv.find(",R,");
  REQUIRE(pos != std::string::npos);
  const auto end = csv.find('\n', pos);
  csv.replace(pos + 3, end - pos - 3, "42");
  const auto corrupt = dir / "corrupt.csv";
  std::ofstream(corrupt) << csv;
  opt.trajectory = corrupt.string();
  CHECK(cmd_verify(opt) == exit_validation);
  const json v = read_json(dir / "verify.json");
  CHECK(v["validation"]["bad_jumps"] == json::array({1}));

  opt.trajectory = (dir / "missing.csv").string();
  CHECK(cmd_verify(opt) == exit_input);
}

TEST_CASE("sweep command") {
  const auto dir = scratch("sweep");
  CommandOptions opt;
  opt.config = "catalog:scalar-sine";
  opt.out = dir.string();
  opt.jobs = 2;
  opt.params = {"/nonlinearity/params/eps=0.01,0.5", "rho_scale=1,1.5"};
  CHECK(cmd_sweep(opt) == exit_ok);
  std::ifstream in(dir / "sweep.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "/nonlinearity/params/eps,rho_scale,LC2,betaC2,converged,iterations,final_residual");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);

  opt.params = {"/nonlinearity/params/eps=x"};
  CHECK(cmd_sweep(opt) == exit_input);
}
