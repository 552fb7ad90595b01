#pragma once
// Forward evolution of the impulsive system between fixed impulse times.

#include "orps/quadrature.hpp"
#include "orps/system.hpp"
#include "orps/trajectory.hpp"

#include <vector>

namespace orps {

struct FlowConfig {
  QuadratureConfig quad{};
  int sample_panels = 4;  // output panels per impulse-free piece
  int sample_nodes = 8;   // Gauss points per output panel (plus the panel ends)
};

/// Mild solution y(t) = T(t - a) y(a) + int_a^t T(t - s) forcing(s) ds between
/// impulses, with y(tau+) = (E + B) y(tau) + d at every extended impulse in
/// (t_begin, t_end]. y0 is the state just after t_begin. A jump exactly at
/// t_end is stored as a one-point final segment.
PiecewiseTrajectory evolve_linear(const Matrix& A, const ImpulseSchedule& schedule, const Vector& y0,
                                  const ForcingFn& forcing, double t_begin, double t_end,
                                  const FlowConfig& cfg = {}, const std::vector<double>& sample_times = {});

inline PiecewiseTrajectory evolve_linear(const Matrix& A, const ImpulseSchedule& schedule, const Vector& y0,
                                         const ForcingFn& forcing, double t_end, const FlowConfig& cfg = {}) {
  return evolve_linear(A, schedule, y0, forcing, 0.0, t_end, cfg);
}

enum class SemilinearScheme { euler_midpoint, rk4 };

struct StepConfig {
  double h = 1.0 / 32.0;   // largest step
  double tol = 1e-11;      // step-doubling tolerance, relative to 1 + |y|
  int max_halvings = 40;
  SemilinearScheme scheme = SemilinearScheme::rk4;
  int quad_nodes = 8;      // memory integral in s
  int quad_panels = 2;
};

/// Memory term z(t) = int_0^t g(t, s, y) ds with y held at the given state.
Vector volterra_at_t(const VolterraProblem& problem, const ImpulseSchedule& schedule, double t, const Vector& y,
                     const StepConfig& cfg);

/// Integrating-factor time stepping for y' = A y + f(t, y, z) with impulses.
/// Every requested sample time in (t_begin, t_end) becomes a step end.
/// With VolterraArg::at_s and t_begin > 0, `history` must cover [0, t_begin].
PiecewiseTrajectory evolve_semilinear(const Matrix& A, const ImpulseSchedule& schedule,
                                      const VolterraProblem& problem, const Vector& y0, double t_begin,
                                      double t_end, const StepConfig& cfg = {},
                                      const std::vector<double>& sample_times = {},
                                      const PiecewiseTrajectory* history = nullptr);

inline PiecewiseTrajectory evolve_semilinear(const Matrix& A, const ImpulseSchedule& schedule,
                                             const VolterraProblem& problem, const Vector& y0, double t_end,
                                             const StepConfig& cfg = {}) {
  return evolve_semilinear(A, schedule, problem, y0, 0.0, t_end, cfg);
}

/// Either evolution, chosen by whether sys carries a nonlinearity. The linear
/// path uses the rho-periodic forcing extension.
PiecewiseTrajectory evolve_system(const SystemSpec& sys, const Vector& y0, double t_begin, double t_end,
                                  const FlowConfig& flow, const StepConfig& step,
                                  const std::vector<double>& sample_times = {},
                                  const PiecewiseTrajectory* history = nullptr);

}  // namespace orps
