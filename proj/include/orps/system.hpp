#pragma once
// Problem instance: y' = A y + f(t, y, z(t)), z(t) = int_0^t g(t, s, y) ds,
// with jumps Delta y = B_k y + d_k at the scheduled impulse times.

#include "orps/schedule.hpp"

#include <functional>
#include <optional>

namespace orps {

using ForcingFn = std::function<Vector(double)>;
using NonlinearityFn = std::function<Vector(double, const Vector&, const Vector&)>;
using VolterraKernelFn = std::function<Vector(double, double, const Vector&)>;

/// Third argument of g inside the memory integral: y(t) as written, or y(s).
enum class VolterraArg { at_t, at_s };

struct VolterraProblem {
  NonlinearityFn f;
  VolterraKernelFn g;  // empty means z = 0
  VolterraArg volterra_arg = VolterraArg::at_t;
  std::optional<double> lipschitz_f;
  std::optional<double> lipschitz_g;
  std::optional<double> growth_alpha;
  std::optional<double> growth_beta;
};

struct SystemSpec {
  Matrix A;
  ImpulseSchedule schedule;
  std::optional<VolterraProblem> problem;
  ForcingFn forcing;  // linear case; empty means zero forcing

  double omega() const { return schedule.omega(); }
  const Matrix& rho() const { return schedule.rho(); }
  Eigen::Index dim() const { return A.rows(); }
  bool is_linear() const { return !problem.has_value(); }

  /// Forcing on [0, omega] extended by f(t + omega) = rho f(t).
  Vector forcing_at(double t) const;

  /// Dimension and finiteness checks; throws on failure.
  void validate() const;
};

/// Linear system with given data (forcing may be empty).
SystemSpec make_linear_system(Matrix A, ImpulseSchedule schedule, ForcingFn forcing = {});
SystemSpec make_semilinear_system(Matrix A, ImpulseSchedule schedule, VolterraProblem problem);

}  // namespace orps
