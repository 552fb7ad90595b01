#pragma once
// Composite Gauss-Legendre quadrature on panels split at caller-supplied
// breakpoints, with bisection refinement against a tolerance.

#include "orps/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace orps {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// q-point Gauss-Legendre rule; cached, safe to call concurrently.
const GaussRule& gauss_legendre(int q);

struct QuadratureConfig {
  int nodes = 8;        // Gauss points per panel
  int panels = 4;       // base panels per breakpoint-free piece
  double tol = 1e-12;   // relative/absolute panel acceptance tolerance
  int max_depth = 30;   // bisection depth before QuadratureFailure
};

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
  return m.norm();
}

template <typename F>
auto gauss_panel(F& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  using R = std::decay_t<decltype(f(mid))>;
  R acc = rule.weights[0] * f(mid + half * rule.nodes[0]);
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  if constexpr (std::is_arithmetic_v<R>) {
    return R(acc * half);
  } else {
    return R(acc * half);
  }
}

template <typename F, typename R>
R refine(F& f, double a, double b, const R& whole, const GaussRule& rule, const QuadratureConfig& cfg, int depth) {
  const double mid = 0.5 * (a + b);
  R left = gauss_panel(f, a, mid, rule);
  R right = gauss_panel(f, mid, b, rule);
  R both = left + right;
  const double err = magnitude(both - whole);
  if (err <= cfg.tol * std::max(1.0, magnitude(both))) return both;
  if (depth >= cfg.max_depth) throw Error(ErrorCode::QuadratureFailure, "panel refinement exceeded depth limit");
  return R(refine(f, a, mid, left, rule, cfg, depth + 1) + refine(f, mid, b, right, rule, cfg, depth + 1));
}

}  // namespace detail

/// Integral of f over [a, b], splitting at every breakpoint strictly inside.
/// Each piece starts from cfg.panels equal panels which are bisected until the
/// one-vs-two-halves estimate passes cfg.tol.
template <typename F>
auto integrate(F&& f, double a, double b, std::span<const double> breakpoints, const QuadratureConfig& cfg) {
  const GaussRule& rule = gauss_legendre(cfg.nodes);
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  using R = std::decay_t<decltype(detail::gauss_panel(f, a, b, rule))>;
  R total = detail::gauss_panel(f, a, a, rule);  // zero of the right shape
  if (!(b > a)) return total;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p], hi = cuts[p + 1];
    const int panels = std::max(1, cfg.panels);
    const double h = (hi - lo) / panels;
    for (int k = 0; k < panels; ++k) {
      const double x0 = lo + h * k;
      const double x1 = (k + 1 == panels) ? hi : lo + h * (k + 1);
      R whole = detail::gauss_panel(f, x0, x1, rule);
      total += detail::refine(f, x0, x1, whole, rule, cfg, 0);
    }
  }
  return total;
}

template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureConfig& cfg) {
  return integrate(std::forward<F>(f), a, b, std::span<const double>{}, cfg);
}

/// Fixed (non-adaptive) composite rule: nodes/weights for `panels` equal
/// panels of every breakpoint-free piece of [a, b].
void composite_rule(double a, double b, std::span<const double> breakpoints, int panels, int q,
                    std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace orps
