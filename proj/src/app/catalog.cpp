#include "orps/app/catalog.hpp"

#include <cmath>

namespace orps::app {

using nlohmann::json;

namespace {

json scalar_base(double a, double rho) {
  return json{{"schema", 1},     {"dimension", 1}, {"omega", 1.0},
              {"A", {{a}}},      {"rho", {{rho}}}, {"impulses", json::array()},
              {"seed", 1}};
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CatalogEntry> build() {
  std::vector<CatalogEntry> out;

  {
    json c = scalar_base(0.0, 2.0);
    c["name"] = "scalar-rho2-forced";
    c["nonlinearity"] = {{"kind", "none"}, {"forcing", {"1"}}};
    out.push_back({"scalar-rho2-forced", "y' = 1 on [0,1], y(1) = 2 y(0); solution y = 1 + t", c,
                   [](double t) { return Vector::Constant(1, 1.0 + t); }});
  }
  {
    json c = scalar_base(0.0, 3.0);
    c["name"] = "scalar-impulse";
    c["impulses"] = json::array({{{"tau", 0.5}, {"B", {{1.0}}}, {"d", {1.0}}}});
    c["nonlinearity"] = {{"kind", "none"}};
    // y0 = d / (c - 1 - b) = 1, then 3 after the jump.
    out.push_back({"scalar-impulse", "y' = 0, jump y+ = 2y + 1 at 0.5, rho = 3; y0 = 1", c,
                   [](double t) { return Vector::Constant(1, t <= 0.5 ? 1.0 : 3.0); }});
  }
  {
    json c = scalar_base(0.0, 1.0);
    c["name"] = "gap-singular";
    c["nonlinearity"] = {{"kind", "none"}, {"forcing", {"1"}}};
    out.push_back({"gap-singular", "rho = T(omega) = 1: the periodic problem has no unique solution", c, {}});
  }
  {
    json c = scalar_base(-1.0, 1.0);
    c["name"] = "scalar-sine";
    c["nonlinearity"] = {{"kind", "builtin"}, {"name", "sine"}, {"params", {{"eps", 0.1}, {"amplitude", 1.0}}}};
    out.push_back({"scalar-sine", "y' = -y + eps sin y + cos(2 pi t), 1-periodic", c, {}});
  }
  {
    json c = scalar_base(-0.5, 2.0);
    c["name"] = "scalar-softabs";
    c["impulses"] = json::array({{{"tau", 0.25}, {"B", {{0.2}}}, {"d", {0.5}}}});
    c["nonlinearity"] = {{"kind", "builtin"},
                         {"name", "softabs"},
                         {"params", {{"c", 2.0}, {"delta", 0.1}, {"eps", 0.1}, {"eps_z", 0.05}, {"phi", 1.0}}}};
    out.push_back({"scalar-softabs", "(1,2)-periodic problem with a memory term and one impulse", c, {}});
  }
  {
    Matrix S(3, 3);
    S << 0.0, 1.0, 0.0, -1.0, 0.0, 0.5, 0.0, -0.5, 0.0;
    const Matrix I = Matrix::Identity(3, 3);
    const Matrix A = 0.4 * S - 0.3 * I;
    const Matrix B1 = 0.2 * S + 0.1 * I;
    const Matrix B2 = 0.05 * S * S - 0.2 * I;
    json c{{"schema", 1}, {"name", "commuting-family"}, {"dimension", 3}, {"omega", 1.0}, {"seed", 1}};
    c["A"] = matrix_json(A);
    c["rho"] = matrix_json(2.0 * I);
    c["impulses"] = json::array({{{"tau", 0.3}, {"B", matrix_json(B1)}, {"d", {1.0, 0.0, -0.5}}},
                                 {{"tau", 0.7}, {"B", matrix_json(B2)}, {"d", {0.0, 0.25, 0.0}}}});
    c["nonlinearity"] = {{"kind", "none"}, {"forcing", {"1", "cos(2*pi*t)", "sin(2*pi*t)"}}};
    out.push_back({"commuting-family", "n = 3, A and B_k polynomials in one matrix, rho = 2I", c, {}});
  }
  return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build();
  return entries;
}

std::optional<CatalogEntry> find_catalog(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  return std::nullopt;
}

}  // namespace orps::app
