#pragma once
// Green-type kernel H(t, tau) of the forced linear impulsive problem and the
// closed-form bounds on its impulse sum (C1) and integral (C2).

#include "orps/quadrature.hpp"
#include "orps/semigroup.hpp"
#include "orps/system.hpp"

#include <string>

namespace orps {

enum class KernelVariant { general, commuting };
enum class KernelBranch { before, after };  // before: tau < t, after: t <= tau

struct KernelEvaluation {
  double t = 0.0;
  double tau = 0.0;
  KernelBranch branch = KernelBranch::after;
  KernelVariant variant = KernelVariant::general;
  Matrix value;
};

/// Caches T(omega), the in-period product and the gap inverse for one system.
///
/// general, after:  T(t) P(0,t) G^{-1} T(omega - tau) P(tau,omega)
/// general, before: (T(t) P(0,t) G^{-1} T(omega - t) P[t,omega) + E) T(t - tau) P(tau,t)
/// commuting, before: rho G^{-1} T(t - tau) P(tau,t)
/// commuting, after:  T(t + omega - tau) P(0,t) P(tau,omega) G^{-1}
/// with G = rho - T(omega) P(0,omega) and P(a,b) the ordered product over a < tau_k < b.
class PeriodicKernel {
 public:
  explicit PeriodicKernel(const SystemSpec& sys);

  const Matrix& gap_inverse() const { return gap_.inverse; }
  double gap_condition() const { return gap_.condition; }
  bool ill_conditioned() const { return gap_.ill_conditioned; }
  const Matrix& period_product() const { return product_; }
  const Matrix& T_omega() const { return t_omega_; }

  KernelEvaluation operator()(double t, double tau, KernelVariant variant = KernelVariant::general) const;

  /// T(t) P(0,t) G^{-1}: the factor shared by every tau at fixed t.
  Matrix left_factor(double t) const;
  /// T(omega - tau) P(tau,omega).
  Matrix right_factor(double tau) const;
  /// Before-branch prefactor T(t) P(0,t) G^{-1} T(omega - t) P[t,omega) + E.
  Matrix before_factor(double t) const;
  /// T(t - tau) P(tau,t) for tau <= t.
  Matrix propagator(double tau, double t) const;

  const SystemSpec& system() const { return *sys_; }

 private:
  const SystemSpec* sys_;
  Matrix t_omega_;
  Matrix product_;
  GapInverse gap_;
};

KernelEvaluation kernel_H(const SystemSpec& sys, double t, double tau);
KernelEvaluation kernel_H_commuting(const SystemSpec& sys, double t, double tau);

/// int_0^omega ||H(t,tau)|| dtau on panels split at the impulse times and t.
double kernel_integral_numeric(const PeriodicKernel& kernel, double t, const QuadratureConfig& quad,
                               KernelVariant variant = KernelVariant::general);
double kernel_integral_numeric(const SystemSpec& sys, double t, const QuadratureConfig& quad);

/// sum_i ||H(t,tau_i)|| ||d_i||.
double kernel_sum_numeric(const PeriodicKernel& kernel, double t, KernelVariant variant = KernelVariant::general);
double kernel_sum_numeric(const SystemSpec& sys, double t);

/// Everything the bound formulas read; the formulas are pure functions of it.
struct BoundInputs {
  double M = 1.0;
  double gamma = 0.0;
  double omega = 1.0;
  double prod_norm = 1.0;        // ||P(0,omega)||
  double prod_sq_norm = 1.0;     // ||P(0,omega)^2||
  double gap_inv_norm = 0.0;     // ||G^{-1}||
  double rho_norm = 1.0;
  double window_max = 1.0;       // max ||P|| over contiguous windows, empty window included
  double prefix_max = 1.0;       // max ||P(0,t)||
  double suffix_max = 1.0;       // max ||P(tau,omega)||
  double cyclic_max = 1.0;       // max over windows wrapping through omega = 0
  double d_sum = 0.0;            // sum ||d_i||
  double d_weighted_sum = 0.0;   // sum e^{gamma (omega - tau_i)} ||d_i||
};

struct BoundReport {
  KernelVariant variant = KernelVariant::general;
  double C1 = 0.0;            // rigorous impulse-sum bound
  double C2 = 0.0;            // rigorous integral bound
  double C1_tight = 0.0;      // C1 with e^{gamma omega} in place of e^{2 gamma omega}
  double C1_as_stated = 0.0;  // closed form exactly as displayed in the source lemma
  double C2_as_stated = 0.0;
  std::string c1_branch;      // "pos" / "nonpos"
  std::string c2_branch;      // "nonzero" / "zero"
  BoundInputs inputs;
};

BoundInputs bound_inputs(const SystemSpec& sys, const GrowthEstimate& growth);
BoundReport bounds_from_inputs(const BoundInputs& in, KernelVariant variant);

/// Both C1 and C2 of the requested variant.
BoundReport bound_general(const SystemSpec& sys, const GrowthEstimate& growth);
BoundReport bound_commuting(const SystemSpec& sys, const GrowthEstimate& growth);

/// (e^{gamma w} - 1) / gamma, continuous at gamma = 0.
double growth_integral(double gamma, double omega);

}  // namespace orps
