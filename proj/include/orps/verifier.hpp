#pragma once
// Numerical checks of the standing assumptions A1-A10, the shooting oracle
// for y(omega; y0) = rho y0, and a posteriori validation of trajectories.

#include "orps/flow.hpp"
#include "orps/semigroup.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace orps {

enum class CheckStatus { pass, fail, not_checkable };
const char* to_string(CheckStatus s) noexcept;

struct AssumptionEntry {
  std::string id;  // "A1" .. "A10"
  CheckStatus status = CheckStatus::pass;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
  std::vector<int> indices;  // offending impulse indices (1-based) where relevant
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;
  bool overall = true;
  double a5_stated_residual = 0.0;  // A5 with inner limit t + omega on the left
  double sampled_L_f = 0.0;
  double sampled_L_g = 0.0;
  double fitted_alpha = 0.0;  // least-squares line shifted up to bound every sample
  double fitted_beta = 0.0;
  GrowthEstimate growth;

  const AssumptionEntry& at(const std::string& id) const;
  std::vector<std::string> failed() const;
};

AssumptionReport check_assumptions(const SystemSpec& sys, double tol, int samples, std::uint64_t seed = 1,
                                   double state_radius = 4.0);

struct NewtonConfig {
  double tol = 1e-11;      // on ||F|| / (1 + ||y0||)
  int max_iter = 30;
  double fd_step = 1e-7;   // relative finite-difference step
  StepConfig step{};
  FlowConfig flow{};
};

struct ShootingResult {
  Vector y0;
  double residual = 0.0;
  int iterations = 0;
};

/// Newton on F(y0) = Y(omega; y0) - rho y0 with a finite-difference Jacobian.
ShootingResult shooting_oracle(const SystemSpec& sys, const Vector& y0_guess, const NewtonConfig& cfg = {});

struct ValidationConfig {
  double tol = 1e-6;      // periodicity, endpoint and jump residuals
  double ode_tol = 1e-5;  // finite-difference ODE residual
  FlowConfig flow{};
  StepConfig step{};
};

struct ValidationReport {
  double periodicity_residual = 0.0;
  double endpoint_residual = 0.0;  // ||y(omega) - rho y(0)|| / (1 + ||y(0)||)
  double ode_residual = 0.0;
  std::vector<double> jump_residuals;  // per in-period impulse
  std::vector<int> bad_jumps;          // 1-based
  bool passed = false;
};

ValidationReport validate_solution(const SystemSpec& sys, const PiecewiseTrajectory& traj,
                                   const ValidationConfig& cfg = {});

}  // namespace orps
