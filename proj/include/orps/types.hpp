#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace orps {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

enum class ErrorCode {
  NonSquare,
  NonFinite,
  DimensionMismatch,
  EigenFailure,
  SingularGap,
  ReversedInterval,
  InvalidSchedule,
  InvalidArgument,
  QuadratureFailure,
  StepFailure,
  NonFiniteState,
  ShortTrajectory,
  CommutationViolation,
  NoConvergence,
  LipschitzEstimateUnstable,
  NewtonDiverged,
  PreconditionViolated,
  ConfigParse,
  SchemaMismatch,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace orps
