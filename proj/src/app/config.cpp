#include "orps/app/config.hpp"

#include "orps/app/expression.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace orps::app {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw Error(ErrorCode::ConfigParse, "field '" + field + "': " + msg);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) bad(path + key, "missing");
  return j.at(key);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(field, "must be finite");
  return v;
}

double number_or(const json& j, const std::string& key, double def, const std::string& path) {
  return j.is_object() && j.contains(key) ? number(j.at(key), path + key) : def;
}

int integer_or(const json& j, const std::string& key, int def, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return def;
  if (!j.at(key).is_number_integer()) bad(path + key, "expected an integer");
  return j.at(key).get<int>();
}

Vector vector_of(const json& j, Eigen::Index n, const std::string& field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) bad(field, "expected an array of " + std::to_string(n) + " numbers");
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = number(j[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_of(const json& j, Eigen::Index n, const std::string& field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) bad(field, "expected " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) bad(rf, "expected " + std::to_string(n) + " entries");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], rf + "[" + std::to_string(c) + "]");
  }
  return m;
}

std::vector<Expression> expressions(const json& in, int n, bool allow_y, bool allow_s, const std::string& field) {
  const json j = (n == 1 && in.is_string()) ? json::array({in}) : in;
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad(field, "expected " + std::to_string(n) + " expression strings");
  std::vector<Expression> out;
  for (int i = 0; i < n; ++i) {
    const json& e = j[static_cast<std::size_t>(i)];
    if (!e.is_string()) bad(field + "[" + std::to_string(i) + "]", "expected a string");
    try {
      out.push_back(Expression::parse(e.get<std::string>(), allow_y ? n : 0, allow_s));
    } catch (const Error& err) {
      bad(field + "[" + std::to_string(i) + "]", err.what());
    }
  }
  return out;
}

Vector softabs(const Vector& v, double floor) { return (v.array().square() + floor * floor).sqrt().matrix(); }

struct Built {
  std::optional<VolterraProblem> problem;
  ForcingFn forcing;
};

Built build_nonlinearity(const json& nl, int n, double omega, const Matrix& rho, VolterraArg arg) {
  const std::string path = "nonlinearity.";
  const json& kind_j = need(nl, "kind", path);
  if (!kind_j.is_string()) bad(path + "kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  Built out;
  const Vector zero = Vector::Zero(n);

  if (kind == "none") {
    if (nl.contains("forcing")) {
      auto fs = expressions(nl.at("forcing"), n, false, false, path + "forcing");
      out.forcing = [fs, n, zero](double t) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v(i) = fs[static_cast<std::size_t>(i)](t, zero, zero);
        return v;
      };
    }
    return out;
  }

  VolterraProblem p;
  p.volterra_arg = arg;
  if (kind == "builtin") {
    const json& name_j = need(nl, "name", path);
    if (!name_j.is_string()) bad(path + "name", "expected a string");
    const std::string name = name_j.get<std::string>();
    const json params = nl.contains("params") ? nl.at("params") : json::object();
    if (!params.is_object()) bad(path + "params", "expected an object");
    const std::string pp = path + "params.";
    if (name == "sine") {
      const double eps = number_or(params, "eps", 0.1, pp);
      const double amp = number_or(params, "amplitude", 1.0, pp);
      p.f = [eps, amp, omega](double t, const Vector& y, const Vector&) {
        return Vector(eps * y.array().sin().matrix() + Vector::Constant(y.size(), amp * std::cos(2.0 * std::numbers::pi * t / omega)));
      };
      p.lipschitz_f = std::abs(eps);
    } else if (name == "softabs") {
      const double c = number_or(params, "c", rho(0, 0), pp);
      if (!(c > 0.0)) bad(pp + "c", "must be positive");
      const double delta = number_or(params, "delta", 0.1, pp);
      const double eps = number_or(params, "eps", 0.1, pp);
      const double eps_z = number_or(params, "eps_z", 0.0, pp);
      const double phi = number_or(params, "phi", 1.0, pp);
      const bool memory = params.value("memory", eps_z != 0.0);
      p.f = [=](double t, const Vector& y, const Vector& z) {
        const double scale = std::pow(c, t / omega);
        Vector v = Vector::Constant(y.size(), phi * scale * (1.0 + std::cos(2.0 * std::numbers::pi * t / omega)));
        v += eps * softabs(y, delta * scale) + eps_z * softabs(z, delta * scale);
        return v;
      };
      if (memory)
        p.g = [omega](double, double s, const Vector& y) { return Vector(std::cos(2.0 * std::numbers::pi * s / omega) * y); };
      p.lipschitz_f = std::max(std::abs(eps), std::abs(eps_z));
      p.lipschitz_g = memory ? 1.0 : 0.0;
      const double sq = std::sqrt(double(n)), cmax = std::max(1.0, c);
      // z = (omega / 2 pi) sin(2 pi t / omega) y(t) under at_t; no closed form otherwise.
      if (arg == VolterraArg::at_t || !memory) {
        p.growth_alpha = 2.0 * std::abs(phi) * sq * cmax + (std::abs(eps) + std::abs(eps_z)) * delta * sq * cmax;
        p.growth_beta = std::abs(eps) + (memory ? std::abs(eps_z) * omega / (2.0 * std::numbers::pi) : 0.0);
      }
    } else if (name == "volterra-linear") {
      const double lambda = number_or(params, "lambda", 1.0, pp);
      p.f = [lambda](double, const Vector&, const Vector& z) { return Vector(lambda * z); };
      p.g = [](double, double, const Vector& y) { return y; };
      p.lipschitz_f = std::abs(lambda);
      p.lipschitz_g = 1.0;
    } else {
      bad(path + "name", "unknown builtin '" + name + "'");
    }
  } else if (kind == "polynomial") {
    const json fj = nl.value("f", json::object());
    const json gj = nl.value("g", json::object());
    const Vector c0 = fj.contains("const") ? vector_of(fj.at("const"), n, path + "f.const") : zero;
    const Matrix Fy = fj.contains("y") ? matrix_of(fj.at("y"), n, path + "f.y") : Matrix::Zero(n, n);
    const Matrix Fz = fj.contains("z") ? matrix_of(fj.at("z"), n, path + "f.z") : Matrix::Zero(n, n);
    std::vector<Matrix> Q;
    if (fj.contains("yy")) {
      const json& q = fj.at("yy");
      if (!q.is_array() || static_cast<int>(q.size()) != n) bad(path + "f.yy", "expected " + std::to_string(n) + " matrices");
      for (int i = 0; i < n; ++i) Q.push_back(matrix_of(q[static_cast<std::size_t>(i)], n, path + "f.yy[" + std::to_string(i) + "]"));
    }
    p.f = [c0, Fy, Fz, Q](double, const Vector& y, const Vector& z) {
      Vector v = c0 + Fy * y + Fz * z;
      for (std::size_t i = 0; i < Q.size(); ++i) v(static_cast<Eigen::Index>(i)) += y.dot(Q[i] * y);
      return v;
    };
    if (!gj.empty()) {
      const Vector g0 = gj.contains("const") ? vector_of(gj.at("const"), n, path + "g.const") : zero;
      const Matrix Gy = gj.contains("y") ? matrix_of(gj.at("y"), n, path + "g.y") : Matrix::Zero(n, n);
      p.g = [g0, Gy](double, double, const Vector& y) { return Vector(g0 + Gy * y); };
    }
  } else if (kind == "expression") {
    auto fs = expressions(need(nl, "f", path), n, true, false, path + "f");
    p.f = [fs, n](double t, const Vector& y, const Vector& z) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = fs[static_cast<std::size_t>(i)](t, y, z);
      return v;
    };
    if (nl.contains("g")) {
      auto gs = expressions(nl.at("g"), n, true, true, path + "g");
      p.g = [gs, n](double t, double s, const Vector& y) {
        Vector v(n);
        const Vector none = Vector::Zero(n);
        for (int i = 0; i < n; ++i) v(i) = gs[static_cast<std::size_t>(i)](t, y, none, s);
        return v;
      };
    }
  } else {
    bad(path + "kind", "unknown kind '" + kind + "'");
  }
  if (nl.contains("lipschitz_f")) p.lipschitz_f = number(nl.at("lipschitz_f"), path + "lipschitz_f");
  if (nl.contains("lipschitz_g")) p.lipschitz_g = number(nl.at("lipschitz_g"), path + "lipschitz_g");
  if (nl.contains("alpha")) p.growth_alpha = number(nl.at("alpha"), path + "alpha");
  if (nl.contains("beta")) p.growth_beta = number(nl.at("beta"), path + "beta");
  out.problem = std::move(p);
  return out;
}

}  // namespace

namespace {

LoadedProblem load_problem_impl(const json& cfg) {
  if (!cfg.is_object()) bad("", "configuration must be a JSON object");
  const json& schema = need(cfg, "schema", "");
  if (!schema.is_number_integer() || schema.get<int>() != 1) bad("schema", "only schema 1 is supported");
  const json& dim_j = need(cfg, "dimension", "");
  if (!dim_j.is_number_integer() || dim_j.get<int>() < 1) bad("dimension", "expected a positive integer");
  const int n = dim_j.get<int>();

  LoadedProblem lp;
  lp.source = cfg;
  lp.name = cfg.value("name", std::string("unnamed"));
  const double omega = number(need(cfg, "omega", ""), "omega");
  if (!(omega > 0.0)) bad("omega", "must be positive");
  Matrix A = matrix_of(need(cfg, "A", ""), n, "A");
  Matrix rho = matrix_of(need(cfg, "rho", ""), n, "rho");

  std::vector<Impulse> imps;
  if (cfg.contains("impulses")) {
    const json& list = cfg.at("impulses");
    if (!list.is_array()) bad("impulses", "expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string f = "impulses[" + std::to_string(k) + "].";
      const json& ij = list[k];
      Impulse imp;
      imp.tau = number(need(ij, "tau", f), f + "tau");
      imp.B = ij.contains("B") ? matrix_of(ij.at("B"), n, f + "B") : Matrix::Zero(n, n);
      imp.d = ij.contains("d") ? vector_of(ij.at("d"), n, f + "d") : Vector::Zero(n);
      if (ij.contains("d_next")) imp.d_next = vector_of(ij.at("d_next"), n, f + "d_next");
      imps.push_back(std::move(imp));
    }
  }

  Settings& s = lp.settings;
  const json solver = cfg.value("solver", json::object());
  s.picard.tol = number_or(solver, "tol", s.picard.tol, "solver.");
  s.picard.max_iter = integer_or(solver, "max_iter", s.picard.max_iter, "solver.");
  s.picard.grid = integer_or(solver, "grid", s.picard.grid, "solver.");
  s.picard.quad_nodes = integer_or(solver, "quad_nodes", s.picard.quad_nodes, "solver.");
  s.picard.max_levels = integer_or(solver, "max_levels", s.picard.max_levels, "solver.");
  if (!(s.picard.tol > 0.0)) bad("solver.tol", "must be positive");
  if (s.picard.max_iter < 1) bad("solver.max_iter", "must be at least 1");
  if (s.picard.grid < 1) bad("solver.grid", "must be at least 1");
  if (s.picard.quad_nodes < 1 || s.picard.quad_nodes > 64) bad("solver.quad_nodes", "must be in 1..64");
  if (s.picard.max_levels < 1) bad("solver.max_levels", "must be at least 1");
  VolterraArg arg = VolterraArg::at_t;
  if (solver.contains("volterra_arg")) {
    const std::string v = solver.at("volterra_arg").is_string() ? solver.at("volterra_arg").get<std::string>() : "";
    if (v == "at_t") arg = VolterraArg::at_t;
    else if (v == "at_s") arg = VolterraArg::at_s;
    else bad("solver.volterra_arg", "expected \"at_t\" or \"at_s\"");
  }
  s.picard.memory.quad_nodes = s.picard.quad_nodes;
  s.nu = number_or(cfg, "nu", s.nu, "");
  if (!(s.nu > 0.0)) bad("nu", "must be positive");
  s.picard.nu = s.nu;
  if (cfg.contains("seed")) {
    const json& sj = cfg.at("seed");
    if (!sj.is_number_integer() || (!sj.is_number_unsigned() && sj.get<std::int64_t>() < 0))
      bad("seed", "expected a non-negative integer");
    s.seed = cfg.at("seed").get<std::uint64_t>();
  }
  const json val = cfg.value("validation", json::object());
  s.validation.tol = number_or(val, "tol", s.validation.tol, "validation.");
  s.validation.ode_tol = number_or(val, "ode_tol", s.validation.ode_tol, "validation.");
  const json as = cfg.value("assumptions", json::object());
  s.assumption_tol = number_or(as, "tol", s.assumption_tol, "assumptions.");
  s.assumption_samples = integer_or(as, "samples", s.assumption_samples, "assumptions.");

  try {
    ImpulseSchedule schedule(omega, rho, std::move(imps));
    Built nl = build_nonlinearity(need(cfg, "nonlinearity", ""), n, omega, rho, arg);
    lp.sys = SystemSpec{std::move(A), std::move(schedule), std::move(nl.problem), std::move(nl.forcing)};
    lp.sys.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigParse) throw;
    throw Error(ErrorCode::ConfigParse, std::string("invalid problem data: ") + e.what());
  }
  return lp;
}

}  // namespace

LoadedProblem load_problem(const json& cfg) {
  try {
    return load_problem_impl(cfg);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigParse, e.what());
  }
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot read configuration file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ConfigParse, path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

}  // namespace orps::app
