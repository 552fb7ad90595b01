#include "orps/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace orps {

namespace {

// Newton iteration on P_q from the Chebyshev-like initial guesses.
GaussRule build_rule(int q) {
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (q == 1) p0 = 1.0;
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (q == 1) p0 = 1.0;
      dp = q * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int q) {
  if (q < 1 || q > 256) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre order must be in [1, 256]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[q];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(q));
  return *slot;
}

void composite_rule(double a, double b, std::span<const double> breakpoints, int panels, int q,
                    std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  if (!(b > a)) return;
  const GaussRule& rule = gauss_legendre(q);
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  panels = std::max(1, panels);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double h = (cuts[p + 1] - cuts[p]) / panels;
    for (int k = 0; k < panels; ++k) {
      const double x0 = cuts[p] + h * k;
      const double x1 = (k + 1 == panels) ? cuts[p + 1] : cuts[p] + h * (k + 1);
      const double half = 0.5 * (x1 - x0), mid = 0.5 * (x0 + x1);
      for (int i = 0; i < q; ++i) {
        nodes.push_back(mid + half * rule.nodes[i]);
        weights.push_back(half * rule.weights[i]);
      }
    }
  }
}

}  // namespace orps
