#include "orps/system.hpp"

#include <cmath>

namespace orps {

Vector SystemSpec::forcing_at(double t) const {
  const Eigen::Index n = dim();
  if (!forcing) return Vector::Zero(n);
  const double w = omega();
  int periods = 0;
  double local = t;
  if (t > w) {
    periods = static_cast<int>(std::floor(t / w));
    local = t - periods * w;
    // Keep the period boundary itself in the earlier period.
    if (local == 0.0) {
      --periods;
      local = w;
    }
  }
  Vector v = forcing(local);
  for (int p = 0; p < periods; ++p) v = rho() * v;
  return v;
}

void SystemSpec::validate() const {
  if (A.rows() != A.cols()) throw Error(ErrorCode::NonSquare, "A is not square");
  if (!A.allFinite()) throw Error(ErrorCode::NonFinite, "A has NaN/Inf entries");
  if (schedule.dim() != A.rows()) throw Error(ErrorCode::DimensionMismatch, "schedule dimension differs from A");
  if (problem && !problem->f) throw Error(ErrorCode::InvalidArgument, "nonlinearity f is missing");
}

SystemSpec make_linear_system(Matrix A, ImpulseSchedule schedule, ForcingFn forcing) {
  SystemSpec sys{std::move(A), std::move(schedule), std::nullopt, std::move(forcing)};
  sys.validate();
  return sys;
}

SystemSpec make_semilinear_system(Matrix A, ImpulseSchedule schedule, VolterraProblem problem) {
  SystemSpec sys{std::move(A), std::move(schedule), std::move(problem), {}};
  sys.validate();
  return sys;
}

}  // namespace orps
