#pragma once
// CSV trajectories: header `t,side,y_1..y_n`, one row per sample, impulse
// times listed twice with sides L and R. Numbers use shortest round-trip form.

#include "orps/trajectory.hpp"

#include <iosfwd>
#include <string>

namespace orps::app {

std::string format_double(double v);

void write_trajectory_csv(std::ostream& out, const PiecewiseTrajectory& traj);
void write_trajectory_csv(const std::string& path, const PiecewiseTrajectory& traj);

/// Throws Error(SchemaMismatch) naming the offending line.
PiecewiseTrajectory read_trajectory_csv(std::istream& in);
PiecewiseTrajectory read_trajectory_csv(const std::string& path);

}  // namespace orps::app
