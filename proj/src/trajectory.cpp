#include "orps/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace orps {

namespace {

double eps_at(double t) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)); }

}  // namespace

Vector interpolate_segment(const TrajectorySegment& seg, double t, int stencil) {
  const auto& ts = seg.times;
  const std::size_t n = ts.size();
  if (n == 1 || t <= ts.front()) return seg.states.front();
  if (t >= ts.back()) return seg.states.back();
  const std::size_t hi = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
  if (ts[hi] == t) return seg.states[hi];
  const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(std::max(2, stencil)), n);
  // Window of `width` samples centred on the bracketing pair.
  std::size_t lo = hi >= width / 2 ? hi - width / 2 : 0;
  lo = std::min(lo, n - width);
  Vector out = Vector::Zero(seg.states.front().size());
  for (std::size_t i = lo; i < lo + width; ++i) {
    double w = 1.0;
    for (std::size_t j = lo; j < lo + width; ++j)
      if (j != i) w *= (t - ts[j]) / (ts[i] - ts[j]);
    out += w * seg.states[i];
  }
  return out;
}

PiecewiseTrajectory::PiecewiseTrajectory(std::vector<TrajectorySegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorCode::InvalidArgument, "trajectory needs at least one segment");
  const Eigen::Index n = segments_.front().states.empty() ? 0 : segments_.front().states.front().size();
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const auto& seg = segments_[j];
    if (seg.times.empty() || seg.times.size() != seg.states.size())
      throw Error(ErrorCode::InvalidArgument, "segment times and states differ in length");
    for (std::size_t i = 1; i < seg.times.size(); ++i)
      if (!(seg.times[i] > seg.times[i - 1])) throw Error(ErrorCode::InvalidArgument, "segment times not increasing");
    for (const Vector& y : seg.states)
      if (y.size() != n) throw Error(ErrorCode::DimensionMismatch, "trajectory states differ in dimension");
    if (j > 0 && std::abs(seg.times.front() - segments_[j - 1].times.back()) > eps_at(seg.times.front()))
      throw Error(ErrorCode::InvalidArgument, "segments are not contiguous");
  }
}

Eigen::Index PiecewiseTrajectory::dim() const { return segments_.front().states.front().size(); }
double PiecewiseTrajectory::t_begin() const { return segments_.front().times.front(); }
double PiecewiseTrajectory::t_end() const { return segments_.back().times.back(); }

std::vector<double> PiecewiseTrajectory::jump_times() const {
  std::vector<double> out;
  for (std::size_t j = 1; j < segments_.size(); ++j) out.push_back(segments_[j].times.front());
  return out;
}

std::size_t PiecewiseTrajectory::segment_of(double t) const {
  // value(t) lives in the first segment whose end is >= t (left continuity).
  for (std::size_t j = 0; j < segments_.size(); ++j)
    if (t <= segments_[j].times.back() + eps_at(t)) return j;
  return segments_.size() - 1;
}

Vector PiecewiseTrajectory::value(double t) const { return interpolate_segment(segments_[segment_of(t)], t); }

Vector PiecewiseTrajectory::right_limit(double t) const {
  const std::size_t j = segment_of(t);
  if (j + 1 < segments_.size() && std::abs(segments_[j].times.back() - t) <= eps_at(t))
    return segments_[j + 1].states.front();
  return interpolate_segment(segments_[j], t);
}

double PiecewiseTrajectory::sup_norm() const {
  double m = 0.0;
  for (const auto& seg : segments_)
    for (const Vector& y : seg.states) m = std::max(m, y.norm());
  return m;
}

std::vector<TrajectorySample> PiecewiseTrajectory::samples() const {
  std::vector<TrajectorySample> rows;
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const auto& seg = segments_[j];
    for (std::size_t i = 0; i < seg.times.size(); ++i) {
      char side = '-';
      if (i == 0 && j > 0) side = 'R';
      if (i + 1 == seg.times.size() && j + 1 < segments_.size()) side = 'L';
      rows.push_back({seg.times[i], side, seg.states[i]});
    }
  }
  return rows;
}

void PiecewiseTrajectory::append(const PiecewiseTrajectory& next, bool jump) {
  if (next.empty()) return;
  if (segments_.empty()) {
    segments_ = next.segments_;
    return;
  }
  if (std::abs(next.t_begin() - t_end()) > eps_at(t_end()))
    throw Error(ErrorCode::InvalidArgument, "appended trajectory does not start at the end time");
  auto it = next.segments_.begin();
  if (!jump) {
    auto& tail = segments_.back();
    tail.times.insert(tail.times.end(), it->times.begin() + 1, it->times.end());
    tail.states.insert(tail.states.end(), it->states.begin() + 1, it->states.end());
    ++it;
  }
  segments_.insert(segments_.end(), it, next.segments_.end());
}

PiecewiseTrajectory trajectory_from_samples(const std::vector<TrajectorySample>& rows) {
  std::vector<TrajectorySegment> segs(1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.side == 'R') {
      if (segs.back().times.empty()) throw Error(ErrorCode::SchemaMismatch, "right limit without a preceding left limit");
      segs.emplace_back();
    }
    auto& seg = segs.back();
    if (!seg.times.empty() && !(r.t > seg.times.back()))
      throw Error(ErrorCode::SchemaMismatch, "sample times must increase within a segment");
    seg.times.push_back(r.t);
    seg.states.push_back(r.y);
    if (r.side == 'L' && (i + 1 >= rows.size() || rows[i + 1].side != 'R'))
      throw Error(ErrorCode::SchemaMismatch, "left limit not followed by a right limit");
  }
  if (segs.front().times.empty()) throw Error(ErrorCode::SchemaMismatch, "trajectory has no samples");
  return PiecewiseTrajectory(std::move(segs));
}

double periodicity_residual(const PiecewiseTrajectory& extended, const Matrix& rho, double omega) {
  if (extended.empty() || extended.t_begin() > eps_at(0.0) || extended.t_end() < 2.0 * omega - eps_at(2.0 * omega))
    throw Error(ErrorCode::ShortTrajectory, "periodicity residual needs coverage of [0, 2 omega]");
  std::set<double> grid;
  const int base = 512;
  for (int i = 0; i <= base; ++i) grid.insert(omega * i / base);
  for (const auto& seg : extended.segments())
    for (double t : seg.times) {
      if (t <= omega) grid.insert(t);
      else if (t <= 2.0 * omega) grid.insert(t - omega);
    }
  auto rel = [&](const Vector& later, const Vector& now) { return (later - rho * now).norm() / (1.0 + now.norm()); };
  double worst = 0.0;
  for (double t : grid) {
    worst = std::max(worst, rel(extended.value(t + omega), extended.value(t)));
    if (t < omega) worst = std::max(worst, rel(extended.right_limit(t + omega), extended.right_limit(t)));
  }
  return worst;
}

}  // namespace orps
