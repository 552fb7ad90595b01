#pragma once
// Fixed impulse times inside one period and their periodic extension
// tau_{k+m} = tau_k + omega, B_{k+m} = B_k, d_{k+m} = rho d_k.

#include "orps/types.hpp"

#include <optional>
#include <vector>

namespace orps {

struct Impulse {
  double tau = 0.0;
  Matrix B;
  Vector d;
  /// d_{k+m} when it is not rho * d (only used to model a broken extension).
  std::optional<Vector> d_next;
};

/// One impulse of the extended schedule.
struct ImpulseEvent {
  double time = 0.0;
  int index = 0;   // in-period index k in [0, m)
  int period = 0;  // p in tau_k + p * omega
  const Matrix* B = nullptr;
  Vector d;
};

class ImpulseSchedule {
 public:
  ImpulseSchedule() = default;
  /// Validates 0 < tau_1 < ... < tau_m < omega and dimensions against rho.
  ImpulseSchedule(double omega, Matrix rho, std::vector<Impulse> impulses);

  double omega() const { return omega_; }
  const Matrix& rho() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  int size() const { return static_cast<int>(impulses_.size()); }
  const std::vector<Impulse>& impulses() const { return impulses_; }
  const Impulse& operator[](int k) const { return impulses_[static_cast<std::size_t>(k)]; }

  /// Jump vector of the impulse tau_k + p * omega.
  Vector d_extended(int k, int period) const;

  /// Extended impulses with s < time < t, ascending. With include_start the
  /// window is [s, t). Times below 0 are never generated.
  std::vector<ImpulseEvent> events(double s, double t, bool include_start = false) const;

  /// True when some extended impulse time equals t (to rounding).
  bool is_impulse_time(double t) const;

 private:
  double omega_ = 1.0;
  Matrix rho_;
  std::vector<Impulse> impulses_;
};

/// #{k : s < tau_k < t} over the extended schedule.
int impulse_count(const ImpulseSchedule& schedule, double s, double t);

/// (E + B_last) ... (E + B_first) over impulses with s < tau_k < t.
Matrix transition_product(const ImpulseSchedule& schedule, double s, double t);

/// Same product over the half-open window s <= tau_k < t.
Matrix transition_product_from(const ImpulseSchedule& schedule, double s, double t);

}  // namespace orps
