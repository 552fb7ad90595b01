#include "orps/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace orps {

namespace {

GapInverse make_gap(const SystemSpec& sys, const Matrix& t_omega, const Matrix& product) {
  return invert_monodromy_gap(sys.rho(), t_omega, product);
}

void require_kernel_args(const SystemSpec& sys, double t, double tau) {
  const double w = sys.omega();
  if (!(t >= 0.0 && t <= w)) throw Error(ErrorCode::InvalidArgument, "kernel needs 0 <= t <= omega");
  if (!(tau >= 0.0 && tau <= w)) throw Error(ErrorCode::InvalidArgument, "kernel needs 0 <= tau <= omega");
}

}  // namespace

PeriodicKernel::PeriodicKernel(const SystemSpec& sys)
    : sys_(&sys),
      t_omega_(expm(sys.A, sys.omega())),
      product_(transition_product(sys.schedule, 0.0, sys.omega())),
      gap_(make_gap(sys, t_omega_, product_)) {}

Matrix PeriodicKernel::left_factor(double t) const {
  return expm(sys_->A, t) * transition_product(sys_->schedule, 0.0, t) * gap_.inverse;
}

Matrix PeriodicKernel::right_factor(double tau) const {
  const double w = sys_->omega();
  return expm(sys_->A, w - tau) * transition_product(sys_->schedule, tau, w);
}

Matrix PeriodicKernel::before_factor(double t) const {
  const double w = sys_->omega();
  const Eigen::Index n = sys_->dim();
  return left_factor(t) * expm(sys_->A, w - t) * transition_product_from(sys_->schedule, t, w) +
         Matrix::Identity(n, n);
}

Matrix PeriodicKernel::propagator(double tau, double t) const {
  return expm(sys_->A, t - tau) * transition_product(sys_->schedule, tau, t);
}

KernelEvaluation PeriodicKernel::operator()(double t, double tau, KernelVariant variant) const {
  require_kernel_args(*sys_, t, tau);
  KernelEvaluation out;
  out.t = t;
  out.tau = tau;
  out.variant = variant;
  out.branch = tau < t ? KernelBranch::before : KernelBranch::after;
  const double w = sys_->omega();
  if (variant == KernelVariant::general) {
    out.value = out.branch == KernelBranch::before ? Matrix(before_factor(t) * propagator(tau, t))
                                                   : Matrix(left_factor(t) * right_factor(tau));
  } else if (out.branch == KernelBranch::before) {
    out.value = sys_->rho() * gap_.inverse * propagator(tau, t);
  } else {
    out.value = expm(sys_->A, t + w - tau) * transition_product(sys_->schedule, 0.0, t) *
                transition_product(sys_->schedule, tau, w) * gap_.inverse;
  }
  return out;
}

KernelEvaluation kernel_H(const SystemSpec& sys, double t, double tau) {
  return PeriodicKernel(sys)(t, tau, KernelVariant::general);
}

KernelEvaluation kernel_H_commuting(const SystemSpec& sys, double t, double tau) {
  return PeriodicKernel(sys)(t, tau, KernelVariant::commuting);
}

double kernel_integral_numeric(const PeriodicKernel& kernel, double t, const QuadratureConfig& quad,
                               KernelVariant variant) {
  const SystemSpec& sys = kernel.system();
  const double w = sys.omega();
  if (!(t >= 0.0 && t <= w)) throw Error(ErrorCode::InvalidArgument, "kernel integral needs 0 <= t <= omega");
  std::vector<double> cuts{t};
  for (const Impulse& imp : sys.schedule.impulses()) cuts.push_back(imp.tau);

  // Factors depending on t alone are formed once.
  Matrix before_left, after_left;
  if (variant == KernelVariant::general) {
    before_left = kernel.before_factor(t);
    after_left = kernel.left_factor(t);
  } else {
    before_left = sys.rho() * kernel.gap_inverse();
    after_left = transition_product(sys.schedule, 0.0, t);
  }
  auto integrand = [&](double tau) -> double {
    if (tau < t) return opnorm2(before_left * kernel.propagator(tau, t));
    if (variant == KernelVariant::general) return opnorm2(after_left * kernel.right_factor(tau));
    return opnorm2(expm(sys.A, t + w - tau) * after_left * transition_product(sys.schedule, tau, w) *
                   kernel.gap_inverse());
  };
  return integrate(integrand, 0.0, w, cuts, quad);
}

double kernel_integral_numeric(const SystemSpec& sys, double t, const QuadratureConfig& quad) {
  return kernel_integral_numeric(PeriodicKernel(sys), t, quad);
}

double kernel_sum_numeric(const PeriodicKernel& kernel, double t, KernelVariant variant) {
  double sum = 0.0;
  for (const Impulse& imp : kernel.system().schedule.impulses())
    sum += opnorm2(kernel(t, imp.tau, variant).value) * imp.d.norm();
  return sum;
}

double kernel_sum_numeric(const SystemSpec& sys, double t) { return kernel_sum_numeric(PeriodicKernel(sys), t); }

double growth_integral(double gamma, double omega) {
  if (gamma == 0.0) return omega;
  return std::expm1(gamma * omega) / gamma;
}

BoundInputs bound_inputs(const SystemSpec& sys, const GrowthEstimate& growth) {
  BoundInputs in;
  in.M = growth.M;
  in.gamma = growth.gamma;
  in.omega = sys.omega();
  const Eigen::Index n = sys.dim();
  const Matrix E = Matrix::Identity(n, n);
  const auto& imps = sys.schedule.impulses();
  const std::size_t m = imps.size();

  const Matrix t_omega = expm(sys.A, in.omega);
  const Matrix product = transition_product(sys.schedule, 0.0, in.omega);
  in.gap_inv_norm = opnorm2(invert_monodromy_gap(sys.rho(), t_omega, product).inverse);
  in.prod_norm = opnorm2(product);
  in.prod_sq_norm = opnorm2(Matrix(product * product));
  in.rho_norm = opnorm2(sys.rho());

  // prefix[i] = (E+B_i)...(E+B_1), suffix[j] = (E+B_m)...(E+B_{j+1}) (0-based, i, j in [0, m]).
  std::vector<Matrix> prefix(m + 1, E), suffix(m + 1, E);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = (E + imps[i].B) * prefix[i];
  for (std::size_t j = m; j-- > 0;) suffix[j] = suffix[j + 1] * (E + imps[j].B);
  in.prefix_max = 0.0;
  in.suffix_max = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    in.prefix_max = std::max(in.prefix_max, opnorm2(prefix[i]));
    in.suffix_max = std::max(in.suffix_max, opnorm2(suffix[i]));
  }
  in.window_max = 1.0;
  for (std::size_t a = 0; a < m; ++a) {
    Matrix w = E;
    for (std::size_t b = a; b < m; ++b) {
      w = (E + imps[b].B) * w;
      in.window_max = std::max(in.window_max, opnorm2(w));
    }
  }
  // Wrapping windows: impulses before t, then those after tau >= t.
  in.cyclic_max = in.window_max;
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = i; j <= m; ++j) in.cyclic_max = std::max(in.cyclic_max, opnorm2(Matrix(prefix[i] * suffix[j])));

  for (const Impulse& imp : imps) {
    in.d_sum += imp.d.norm();
    in.d_weighted_sum += std::exp(in.gamma * (in.omega - imp.tau)) * imp.d.norm();
  }
  return in;
}

BoundReport bounds_from_inputs(const BoundInputs& in, KernelVariant variant) {
  BoundReport r;
  r.variant = variant;
  r.inputs = in;
  const bool pos = in.gamma > 0.0;
  r.c1_branch = pos ? "pos" : "nonpos";
  r.c2_branch = in.gamma != 0.0 ? "nonzero" : "zero";
  const double M = in.M, g = in.gap_inv_norm;
  const double phi = growth_integral(in.gamma, in.omega);
  const double e1 = std::exp(in.gamma * in.omega);
  const double sum_d = pos ? in.d_weighted_sum : in.d_sum;
  const double p1 = std::max(in.prod_norm, 1.0);
  const double p2 = std::max(in.prod_sq_norm, 1.0);

  if (variant == KernelVariant::general) {
    const double pi2 = in.prefix_max * in.suffix_max;
    const double pi = std::max(in.window_max, pi2);
    r.C2 = (M * pi2 * g * std::max(e1, 1.0) + in.window_max) * M * phi;
    r.C1 = M * pi * (pos ? e1 * e1 : 1.0) * (M * g + 1.0) * sum_d;
    r.C1_tight = M * pi * (pos ? e1 : 1.0) * (M * g + 1.0) * sum_d;
    r.C1_as_stated = M * p2 * (pos ? std::max(e1 * e1, 1.0) : 1.0) * (M * g + 1.0) * sum_d;
    r.C2_as_stated = in.gamma != 0.0 ? (M * p2 * g * e1 + p1) * M * phi : (M * p2 * g + p1) * M * in.omega;
  } else {
    const double outer = pos ? std::max(in.rho_norm, e1) : std::max(in.rho_norm, 1.0);
    r.C1 = M * g * in.cyclic_max * outer * sum_d;
    r.C1_tight = r.C1;
    r.C2 = M * g * in.cyclic_max * std::max(in.rho_norm, 1.0) * phi;
    r.C1_as_stated = M * g * p1 * outer * sum_d;
    r.C2_as_stated = M * g * p1 * std::max(in.rho_norm, 1.0) * phi;
  }
  return r;
}

BoundReport bound_general(const SystemSpec& sys, const GrowthEstimate& growth) {
  return bounds_from_inputs(bound_inputs(sys, growth), KernelVariant::general);
}

BoundReport bound_commuting(const SystemSpec& sys, const GrowthEstimate& growth) {
  return bounds_from_inputs(bound_inputs(sys, growth), KernelVariant::commuting);
}

}  // namespace orps
