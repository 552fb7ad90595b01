#pragma once
// Periodic solutions: the boundary-equation linear solve, the operator
// (R y)(t) = int_0^omega H(t,tau) F(tau) dtau + sum_i H(t,tau_i) d_i with
// F(tau) = f(tau, y(tau), z(tau)), its Picard iteration, and the contraction
// and invariant-ball certificates.

#include "orps/flow.hpp"
#include "orps/kernel.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace orps {

/// y0 = G^{-1} (int_0^omega T(omega - tau) P(tau,omega) f dtau + sum_i T(omega - tau_i) P(tau_i,omega) d_i).
Vector periodic_initial_state(const SystemSpec& sys, const QuadratureConfig& quad = {});

/// Trajectory on [0, omega] from periodic_initial_state. Linear systems only.
PiecewiseTrajectory solve_linear_periodic(const SystemSpec& sys, const QuadratureConfig& quad = {},
                                          const FlowConfig& flow = {});

struct PicardConfig {
  double tol = 1e-10;
  int max_iter = 200;
  int grid = 2;         // base panels per impulse-free segment
  int quad_nodes = 8;   // Gauss points per panel
  int max_levels = 3;   // grid doublings, the first included
  double nu = 0.0;      // ball radius to monitor; 0 disables
  StepConfig memory{};  // quadrature for the memory term (nodes, panels)
};

/// R on a fixed grid: per segment, `panels` equal panels with Gauss nodes and
/// panel ends as output times. Kernel values are tabulated at construction.
class PicardOperator {
 public:
  PicardOperator(const SystemSpec& sys, int panels, int quad_nodes, const StepConfig& memory = {});

  /// R y; y is read through value() at the quadrature nodes.
  PiecewiseTrajectory apply(const PiecewiseTrajectory& y) const;

  /// Output times per segment (segment j spans [c_j, c_{j+1}]).
  const std::vector<std::vector<double>>& grid() const { return grid_; }
  /// Trajectory on the grid with the given function values (jumps not applied).
  PiecewiseTrajectory sample(const std::function<Vector(int segment, double t)>& fn) const;

  const PeriodicKernel& kernel() const { return kernel_; }

 private:
  struct Node {
    double tau;
    double weight;
    int base;  // index into base nodes, or -1 for a split-panel node
  };
  struct Row {
    double t;
    std::vector<Node> nodes;
    std::vector<Matrix> H;
    Vector impulse_sum;
  };

  Vector forcing(double tau, const PiecewiseTrajectory& y) const;

  const SystemSpec& sys_;
  PeriodicKernel kernel_;
  StepConfig memory_;
  std::vector<std::vector<double>> grid_;
  std::vector<double> base_tau_;
  std::vector<double> base_weight_;
  std::vector<std::vector<Row>> rows_;  // per segment, rows for grid points computed by the kernel
};

/// One application of R on the grid of cfg.grid panels per segment.
PiecewiseTrajectory picard_apply(const SystemSpec& sys, const PiecewiseTrajectory& y, const PicardConfig& cfg = {});

struct IterationRecord {
  int level = 0;
  int iteration = 0;
  double distance = 0.0;  // sup-grid ||y^{n+1} - y^n||
  double rate = std::numeric_limits<double>::quiet_NaN();  // distance / previous distance
  double sup_norm = 0.0;
};

struct ConvergenceLog {
  std::vector<IterationRecord> records;
  bool converged = false;
  int iterations = 0;    // index n of the accepted iterate at the final level
  int applications = 0;  // total applications of R
  int levels = 0;
  int panels = 0;
  double final_distance = 0.0;
  double level_agreement = std::numeric_limits<double>::quiet_NaN();  // sup distance / (1 + sup norm)
  bool grid_converged = false;
  bool nu_escaped = false;
  double nu_final = 0.0;
  bool certificate_stale = false;

  /// Largest recorded rate over iterations n >= from (NaN if none recorded).
  double max_rate(int from = 1) const;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, ConvergenceLog log)
      : Error(ErrorCode::NoConvergence, what), log_(std::move(log)) {}
  const ConvergenceLog& log() const { return log_; }

 private:
  ConvergenceLog log_;
};

struct PicardResult {
  PiecewiseTrajectory solution;
  ConvergenceLog log;
};

/// y^0 = 0 (or `start`), y^{n+1} = R y^n, with grid doubling until two levels
/// agree within tol / 4.
PicardResult solve_semilinear_picard(const SystemSpec& sys, const PicardConfig& cfg = {},
                                     const PiecewiseTrajectory* start = nullptr);

struct CertificateConfig {
  GrowthMethod growth_method = GrowthMethod::logarithmic_norm;
  int growth_grid = 256;
  KernelVariant variant = KernelVariant::general;
  int lipschitz_samples = 200;
  std::uint64_t seed = 1;
  int f0_grid = 1024;
  StepConfig memory{};
};

struct Certificate {
  double M = 1.0;
  double gamma = 0.0;
  BoundReport bounds;   // C1, C2 of the selected variant
  double C1 = 0.0;
  double C2 = 0.0;
  double nu = 0.0;
  double L_f = 0.0;
  double L_g = 0.0;
  bool lipschitz_sampled = false;
  double L = 0.0;        // L_f (1 + omega L_g)
  double M1 = 0.0;       // omega L_f, so that L = L_f + M1 L_g
  double f0 = 0.0;       // max_t ||f(t, 0, int_0^t g(t,s,0) ds)||
  bool contraction_ok = false;
  double norm_bound = std::numeric_limits<double>::infinity();
  bool nu_consistent = false;
  double alpha = 0.0;
  double beta = 0.0;
  bool growth_supplied = false;
  bool schauder_ok = false;
  double ball_radius_l = std::numeric_limits<double>::infinity();
  bool stale = false;
};

Certificate contraction_certificate(const SystemSpec& sys, double nu, const CertificateConfig& cfg = {});

struct BallCheckReport {
  double l = 0.0;
  int samples = 0;
  int violations = 0;
  double max_ratio = 0.0;  // max ||R y|| / l over the samples
};

BallCheckReport existence_ball(const SystemSpec& sys, const Certificate& cert, int samples,
                               const PicardConfig& cfg = {}, std::uint64_t seed = 7);

/// max over grid of ||f(t, y, z)|| for y = 0 with the memory term of y = 0.
double forcing_sup_at_zero(const SystemSpec& sys, int grid, const StepConfig& memory);

/// z(t) for the trajectory y under the system's memory convention.
Vector memory_term(const SystemSpec& sys, double t, const PiecewiseTrajectory& y, const StepConfig& memory);

}  // namespace orps
