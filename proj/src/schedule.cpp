#include "orps/schedule.hpp"

#include <cmath>
#include <limits>

namespace orps {

namespace {

// Impulse times are compared with a relative slack so that tau_k + p * omega
// computed in floating point still matches the same instant computed as t + omega.
double time_slack(double t) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)); }

}  // namespace

ImpulseSchedule::ImpulseSchedule(double omega, Matrix rho, std::vector<Impulse> impulses)
    : omega_(omega), rho_(std::move(rho)), impulses_(std::move(impulses)) {
  if (!(omega_ > 0.0) || !std::isfinite(omega_)) throw Error(ErrorCode::InvalidSchedule, "omega must be positive");
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw Error(ErrorCode::NonSquare, "rho must be square");
  if (!rho_.allFinite()) throw Error(ErrorCode::NonFinite, "rho has NaN/Inf entries");
  const Eigen::Index n = rho_.rows();
  double prev = 0.0;
  for (std::size_t k = 0; k < impulses_.size(); ++k) {
    const Impulse& imp = impulses_[k];
    if (!(imp.tau > prev) || !(imp.tau < omega_))
      throw Error(ErrorCode::InvalidSchedule, "impulse times must satisfy 0 < tau_1 < ... < tau_m < omega");
    prev = imp.tau;
    if (imp.B.rows() != n || imp.B.cols() != n || imp.d.size() != n ||
        (imp.d_next && imp.d_next->size() != n))
      throw Error(ErrorCode::DimensionMismatch, "impulse " + std::to_string(k + 1) + " has wrong dimensions");
    if (!imp.B.allFinite() || !imp.d.allFinite() || (imp.d_next && !imp.d_next->allFinite()))
      throw Error(ErrorCode::NonFinite, "impulse " + std::to_string(k + 1) + " has NaN/Inf entries");
  }
}

Vector ImpulseSchedule::d_extended(int k, int period) const {
  const Impulse& imp = (*this)[k];
  if (period <= 0) return imp.d;
  Vector d = imp.d_next ? *imp.d_next : Vector(rho_ * imp.d);
  for (int p = 1; p < period; ++p) d = rho_ * d;
  return d;
}

std::vector<ImpulseEvent> ImpulseSchedule::events(double s, double t, bool include_start) const {
  std::vector<ImpulseEvent> out;
  if (impulses_.empty() || !(t > s)) return out;
  const int first = std::max(0, static_cast<int>(std::floor(s / omega_)) - 1);
  const int last = static_cast<int>(std::floor(t / omega_)) + 1;
  for (int p = first; p <= last; ++p) {
    for (int k = 0; k < size(); ++k) {
      const double time = impulses_[static_cast<std::size_t>(k)].tau + p * omega_;
      const bool at_start = std::abs(time - s) <= time_slack(s);
      const bool after_start = include_start ? (time > s || at_start) : (time > s && !at_start);
      const bool before_end = time < t && std::abs(time - t) > time_slack(t);
      if (after_start && before_end)
        out.push_back({time, k, p, &impulses_[static_cast<std::size_t>(k)].B, d_extended(k, p)});
    }
  }
  return out;
}

bool ImpulseSchedule::is_impulse_time(double t) const {
  if (impulses_.empty() || t < 0.0) return false;
  const int p0 = static_cast<int>(std::floor(t / omega_));
  for (int p = std::max(0, p0 - 1); p <= p0 + 1; ++p)
    for (const Impulse& imp : impulses_)
      if (std::abs(imp.tau + p * omega_ - t) <= time_slack(t)) return true;
  return false;
}

int impulse_count(const ImpulseSchedule& schedule, double s, double t) {
  if (s > t) throw Error(ErrorCode::ReversedInterval, "impulse_count needs s <= t");
  return static_cast<int>(schedule.events(s, t).size());
}

namespace {

Matrix ordered_product(const ImpulseSchedule& schedule, const std::vector<ImpulseEvent>& events) {
  const Eigen::Index n = schedule.dim();
  Matrix prod = Matrix::Identity(n, n);
  for (const ImpulseEvent& ev : events) prod = (Matrix::Identity(n, n) + *ev.B) * prod;
  return prod;
}

}  // namespace

Matrix transition_product(const ImpulseSchedule& schedule, double s, double t) {
  if (s > t) throw Error(ErrorCode::ReversedInterval, "transition_product needs s <= t");
  return ordered_product(schedule, schedule.events(s, t));
}

Matrix transition_product_from(const ImpulseSchedule& schedule, double s, double t) {
  if (s > t) throw Error(ErrorCode::ReversedInterval, "transition_product needs s <= t");
  return ordered_product(schedule, schedule.events(s, t, true));
}

}  // namespace orps
