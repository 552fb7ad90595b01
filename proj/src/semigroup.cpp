#include "orps/semigroup.hpp"

namespace orps {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::SingularGap: return "SingularGap";
    case ErrorCode::ReversedInterval: return "ReversedInterval";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::ShortTrajectory: return "ShortTrajectory";
    case ErrorCode::CommutationViolation: return "CommutationViolation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::LipschitzEstimateUnstable: return "LipschitzEstimateUnstable";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

}  // namespace orps
