#pragma once
// Dense matrix algebra for the linear part of the evolution: T(t) = exp(A t),
// growth bounds ||T(t)|| <= M exp(gamma t), commutator checks and the inverse of
// the monodromy gap rho - T(omega) * prod(E + B_k).

#include "orps/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace orps {

/// Operator 2-norm (largest singular value). Vectors get their Euclidean norm.
template <typename Derived>
typename Derived::RealScalar opnorm2(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  if (m.size() == 0) return Real(0);
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  using Plain = MatrixX<typename Derived::Scalar>;
  const Plain gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Plain> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    Eigen::JacobiSVD<Plain> svd(m);
    return svd.singularValues()(0);
  }
  return std::sqrt(std::max(Real(0), es.eigenvalues().maxCoeff()));
}

namespace detail {

template <typename Derived>
void require_square_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::NonSquare, std::string(what) + " is not square");
  if (!a.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has NaN/Inf entries");
}

}  // namespace detail

/// Semigroup T(t) = exp(A t) for t >= 0.
///
/// Backed by Eigen's scaling-and-squaring Pade evaluation (degree chosen from
/// {3,5,7,9,13} by the 1-norm), which targets unit roundoff; `tol` is the
/// accuracy the caller requires and must not be below machine epsilon.
/// expm(A, 0) is the identity exactly.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& a,
                                       typename Derived::RealScalar t,
                                       typename Derived::RealScalar tol = 1e-13) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Derived::RealScalar;
  detail::require_square_finite(a, "generator");
  if (!(t >= Real(0)) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "expm needs finite t >= 0");
  if (!(tol > Real(0))) throw Error(ErrorCode::InvalidArgument, "expm needs tol > 0");
  const Eigen::Index n = a.rows();
  if (t == Real(0)) return MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> scaled = a * Scalar(t);
  MatrixX<Scalar> out = scaled.exp();
  if (!out.allFinite()) throw Error(ErrorCode::NonFinite, "exp(A t) overflowed");
  return out;
}

enum class GrowthMethod { logarithmic_norm, sampled };

struct GrowthEstimate {
  double M = 1.0;
  double gamma = 0.0;
  GrowthMethod method = GrowthMethod::logarithmic_norm;
  /// max over the validation grid of ||T(t)|| / (M e^{gamma t}).
  double validation_ratio = 0.0;
};

/// Logarithmic 2-norm mu(A) = lambda_max((A + A^T) / 2).
template <typename Derived>
typename Derived::RealScalar logarithmic_norm(const Eigen::MatrixBase<Derived>& a) {
  using Plain = MatrixX<typename Derived::Scalar>;
  detail::require_square_finite(a, "generator");
  const Plain sym = (a + a.transpose()) / 2;
  Eigen::SelfAdjointEigenSolver<Plain> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "symmetric eigensolve did not converge");
  return es.eigenvalues().maxCoeff();
}

/// Growth constants with ||exp(A t)|| <= M e^{gamma t}, validated on
/// {0, h, ..., horizon} with h = horizon / grid_size.
///
/// The logarithmic-norm method (M = 1) is a rigorous bound for every t >= 0.
/// The sampled method takes gamma = max Re(eig A) and fits M on the grid only.
template <typename Derived>
GrowthEstimate estimate_growth(const Eigen::MatrixBase<Derived>& a, double horizon, int grid_size,
                               GrowthMethod method = GrowthMethod::logarithmic_norm) {
  using Plain = MatrixX<typename Derived::Scalar>;
  detail::require_square_finite(a, "generator");
  if (!(horizon > 0.0) || grid_size < 1) throw Error(ErrorCode::InvalidArgument, "growth grid must be non-empty");

  GrowthEstimate est;
  est.method = method;
  if (method == GrowthMethod::logarithmic_norm) {
    est.gamma = logarithmic_norm(a);
    est.M = 1.0;
  } else {
    Eigen::EigenSolver<Plain> es(a, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolve did not converge");
    est.gamma = es.eigenvalues().real().maxCoeff();
    est.M = 1.0;
  }

  const double h = horizon / grid_size;
  double worst = 0.0;
  for (int i = 0; i <= grid_size; ++i) {
    const double t = h * i;
    const double ratio = opnorm2(expm(a, t)) / (est.M * std::exp(est.gamma * t));
    worst = std::max(worst, ratio);
  }
  if (method == GrowthMethod::sampled) {
    est.M = std::max(1.0, worst);
    worst /= est.M;
  } else if (worst > 1.0 + 1e-12) {
    // The bound is exact in real arithmetic; only a failing expm gets here.
    est.M = worst;
    worst = 1.0;
  }
  est.validation_ratio = worst;
  return est;
}

struct CommuteCheck {
  bool commute = false;
  double residual = 0.0;
};

/// residual = ||PQ - QP|| / max(1, ||P|| ||Q||).
template <typename DerivedP, typename DerivedQ>
CommuteCheck check_commute(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q, double tol) {
  if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows())
    throw Error(ErrorCode::DimensionMismatch, "commutator needs square matrices of equal size");
  using Plain = MatrixX<typename DerivedP::Scalar>;
  const Plain comm = p * q - q * p;
  const double scale = std::max(1.0, double(opnorm2(p) * opnorm2(q)));
  CommuteCheck out;
  out.residual = opnorm2(comm) / scale;
  out.commute = out.residual <= tol;
  return out;
}

struct GapInverse {
  Matrix inverse;
  double condition = 1.0;
  bool ill_conditioned = false;
};

/// (rho - T(omega) * prod)^{-1} via a fully pivoted LU solve.
///
/// Throws SingularGap when the gap is singular to working precision.
template <typename D1, typename D2, typename D3>
GapInverse invert_monodromy_gap(const Eigen::MatrixBase<D1>& rho, const Eigen::MatrixBase<D2>& t_omega,
                                const Eigen::MatrixBase<D3>& prod_impulses) {
  const Eigen::Index n = rho.rows();
  if (rho.cols() != n || t_omega.rows() != n || t_omega.cols() != n || prod_impulses.rows() != n ||
      prod_impulses.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "gap operands must be square of equal size");
  const Matrix gap = rho - t_omega * prod_impulses;
  if (!gap.allFinite()) throw Error(ErrorCode::NonFinite, "gap matrix has NaN/Inf entries");

  Eigen::JacobiSVD<Matrix> svd(gap);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(n - 1);
  const double eps = std::numeric_limits<double>::epsilon();
  if (smax == 0.0 || smin <= smax * double(n) * eps)
    throw Error(ErrorCode::SingularGap, "rho - T(omega) prod(E + B_k) is singular to working precision");

  GapInverse out;
  out.condition = smax / smin;
  out.ill_conditioned = out.condition > 1.0 / std::sqrt(eps);
  Eigen::FullPivLU<Matrix> lu(gap);
  out.inverse = lu.inverse();
  return out;
}

}  // namespace orps
