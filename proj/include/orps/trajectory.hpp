#pragma once
// Left-continuous piecewise trajectories. Segments are split only at impulse
// times; segment j covers [a_j, b_j], its first sample is the right limit at
// a_j and its last sample the left limit at b_j.

#include "orps/types.hpp"

#include <vector>

namespace orps {

struct TrajectorySegment {
  std::vector<double> times;   // strictly increasing
  std::vector<Vector> states;
};

/// One row of the lossless sample listing: side 'L'/'R' at impulse times, '-' elsewhere.
struct TrajectorySample {
  double t;
  char side;
  Vector y;
};

class PiecewiseTrajectory {
 public:
  PiecewiseTrajectory() = default;
  explicit PiecewiseTrajectory(std::vector<TrajectorySegment> segments);

  bool empty() const { return segments_.empty(); }
  Eigen::Index dim() const;
  double t_begin() const;
  double t_end() const;
  const std::vector<TrajectorySegment>& segments() const { return segments_; }
  std::vector<TrajectorySegment>& segments() { return segments_; }

  /// Times between consecutive segments.
  std::vector<double> jump_times() const;

  /// y(t), left limit at jump times. Interpolates with a local Lagrange stencil.
  Vector value(double t) const;
  /// y(t+); equals value(t) away from jump times.
  Vector right_limit(double t) const;
  /// State after the final instant (includes a jump exactly at t_end).
  const Vector& terminal() const { return segments_.back().states.back(); }

  double sup_norm() const;
  std::vector<TrajectorySample> samples() const;

  /// Appends `next`, whose t_begin must equal this t_end. Without a jump the
  /// two end segments are merged.
  void append(const PiecewiseTrajectory& next, bool jump);

  /// Index of the segment holding value(t).
  std::size_t segment_of(double t) const;

 private:
  std::vector<TrajectorySegment> segments_;
};

/// Builds a trajectory from a listing of samples in the CSV convention.
PiecewiseTrajectory trajectory_from_samples(const std::vector<TrajectorySample>& rows);

/// Sup over grid points t in [0, omega] of ||y(t + omega) - rho y(t)|| / (1 + ||y(t)||),
/// checked on left and right limits at jump times.
double periodicity_residual(const PiecewiseTrajectory& extended, const Matrix& rho, double omega);

/// Interpolate a single segment at t (clamped to its range).
Vector interpolate_segment(const TrajectorySegment& seg, double t, int stencil = 10);

}  // namespace orps
