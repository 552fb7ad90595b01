#include "orps/verifier.hpp"

#include "orps/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace orps {

const char* to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_checkable: return "not-checkable";
  }
  return "unknown";
}

const AssumptionEntry& AssumptionReport::at(const std::string& id) const {
  for (const auto& e : entries)
    if (e.id == id) return e;
  throw Error(ErrorCode::InvalidArgument, "no assumption entry " + id);
}

std::vector<std::string> AssumptionReport::failed() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (e.status == CheckStatus::fail) out.push_back(e.id);
  return out;
}

namespace {

AssumptionEntry verdict(std::string id, double residual, double tol, std::string detail) {
  AssumptionEntry e;
  e.id = std::move(id);
  e.residual = residual;
  e.tolerance = tol;
  e.status = residual <= tol ? CheckStatus::pass : CheckStatus::fail;
  e.detail = std::move(detail);
  return e;
}

Vector random_state(std::mt19937_64& rng, Eigen::Index n, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = normal(rng);
  const double r = y.norm();
  if (r > 0.0) y *= radius * std::pow(unit(rng), 1.0 / double(n)) / r;
  return y;
}

Vector memory_const(const VolterraProblem& p, const ImpulseSchedule& sch, double t_upper, double t_arg,
                    const Vector& y) {
  // int_0^{t_upper} g(t_arg, s, y) ds.
  if (!p.g || !(t_upper > 0.0)) return Vector::Zero(y.size());
  std::vector<double> cuts;
  for (const ImpulseEvent& ev : sch.events(0.0, t_upper)) cuts.push_back(ev.time);
  std::vector<double> nodes, weights;
  composite_rule(0.0, t_upper, cuts, 4, 8, nodes, weights);
  Vector z = Vector::Zero(y.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) z += weights[i] * p.g(t_arg, nodes[i], y);
  return z;
}

}  // namespace

AssumptionReport check_assumptions(const SystemSpec& sys, double tol, int samples, std::uint64_t seed,
                                   double state_radius) {
  AssumptionReport rep;
  const Eigen::Index n = sys.dim();
  const auto& imps = sys.schedule.impulses();
  const Matrix& rho = sys.rho();
  const double w = sys.omega();

  {  // A1: A B_k = B_k A, enough for T(t) B_k = B_k T(t).
    double worst = 0.0;
    std::vector<int> bad;
    for (std::size_t k = 0; k < imps.size(); ++k) {
      const double r = check_commute(sys.A, imps[k].B, tol).residual;
      worst = std::max(worst, r);
      if (r > tol) bad.push_back(static_cast<int>(k + 1));
    }
    auto e = verdict("A1", worst, tol, "max commutator residual of A with B_k");
    e.indices = bad;
    rep.entries.push_back(e);
  }
  {  // A2: extension fields reproduce d_{k+m} = rho d_k.
    double worst = 0.0;
    std::vector<int> bad;
    for (std::size_t k = 0; k < imps.size(); ++k) {
      const Vector expected = rho * imps[k].d;
      const Vector actual = sys.schedule.d_extended(static_cast<int>(k), 1);
      const double r = (actual - expected).norm() / (1.0 + expected.norm());
      worst = std::max(worst, r);
      if (r > tol) bad.push_back(static_cast<int>(k + 1));
    }
    auto e = verdict("A2", worst, tol, "periodic extension d_{k+m} against rho d_k");
    e.indices = bad;
    rep.entries.push_back(e);
  }
  {  // A3
    double worst = check_commute(rho, sys.A, tol).residual;
    std::vector<int> bad;
    for (std::size_t k = 0; k < imps.size(); ++k) {
      const double r = check_commute(rho, imps[k].B, tol).residual;
      worst = std::max(worst, r);
      if (r > tol) bad.push_back(static_cast<int>(k + 1));
    }
    auto e = verdict("A3", worst, tol, "max commutator residual of rho with A and B_k");
    e.indices = bad;
    rep.entries.push_back(e);
  }
  {  // A4: residual = eps * condition number, 1 when singular.
    AssumptionEntry e;
    e.id = "A4";
    e.tolerance = tol;
    try {
      const GapInverse gi = invert_monodromy_gap(rho, expm(sys.A, w), transition_product(sys.schedule, 0.0, w));
      e.residual = std::numeric_limits<double>::epsilon() * gi.condition;
      e.status = e.residual <= tol ? CheckStatus::pass : CheckStatus::fail;
      e.detail = "gap condition number " + std::to_string(gi.condition) + (gi.ill_conditioned ? " (ill-conditioned)" : "");
    } catch (const Error& err) {
      if (err.code() != ErrorCode::SingularGap) throw;
      e.residual = 1.0;
      e.status = CheckStatus::fail;
      e.detail = "gap is singular";
    }
    rep.entries.push_back(e);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (sys.is_linear()) {
    // f(t, y, z) = forcing(t): the extension is built in and the constants are exact.
    double a5 = 0.0, alpha = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double t = w * unit(rng);
      const Vector ft = sys.forcing_at(t);
      a5 = std::max(a5, (sys.forcing_at(t + w) - rho * ft).norm() / (1.0 + (rho * ft).norm()));
    }
    alpha = forcing_sup_at_zero(sys, 1024, StepConfig{});
    rep.a5_stated_residual = a5;
    rep.entries.push_back(verdict("A5", a5, tol, "forcing extension f(t + omega) = rho f(t)"));
    rep.entries.push_back(verdict("A6", 0.0, tol, "no memory term"));
    rep.entries.push_back(verdict("A7", 0.0, tol, "forcing-only right-hand side: L_f = L_g = 0"));
    rep.entries.push_back(verdict("A8", 0.0, tol, "alpha = sup ||forcing|| = " + std::to_string(alpha) + ", beta = 0"));
    rep.fitted_alpha = alpha;
  } else {
    const VolterraProblem& p = *sys.problem;
    double a5 = 0.0, a5_stated = 0.0, a6 = 0.0, lf = 0.0, lg = 0.0;
    std::vector<double> ys, fs;
    for (int i = 0; i < samples; ++i) {
      const double t = 2.0 * w * unit(rng);
      const Vector y = random_state(rng, n, state_radius);
      const Vector z = memory_const(p, sys.schedule, t, t, y);
      const Vector rhs = rho * p.f(t, y, z);
      const double scale = 1.0 + rhs.norm();
      a5 = std::max(a5, (p.f(t + w, rho * y, rho * z) - rhs).norm() / scale);
      const Vector z_stated = memory_const(p, sys.schedule, t + w, t, y);
      a5_stated = std::max(a5_stated, (p.f(t + w, rho * y, rho * z_stated) - rhs).norm() / scale);
      if (p.g) {
        const double s = t * unit(rng);
        const Vector gy = rho * p.g(t, s, y);
        a6 = std::max(a6, (p.g(t + w, s, rho * y) - gy).norm() / (1.0 + gy.norm()));
        const Vector y2 = random_state(rng, n, state_radius);
        const double dy = (y - y2).norm();
        if (dy > 0.0) lg = std::max(lg, (p.g(t, s, y) - p.g(t, s, y2)).norm() / dy);
      }
      const Vector x2 = random_state(rng, n, state_radius);
      const Vector z2 = random_state(rng, n, state_radius);
      const double den = (y - x2).norm() + (z - z2).norm();
      if (den > 0.0) lf = std::max(lf, (p.f(t, y, z) - p.f(t, x2, z2)).norm() / den);
      ys.push_back(y.norm());
      fs.push_back(p.f(t, y, z).norm());
    }
    rep.a5_stated_residual = a5_stated;
    auto e5 = verdict("A5", a5, tol, "inner limits matched at t; stated form residual " + std::to_string(a5_stated));
    rep.entries.push_back(e5);
    rep.entries.push_back(verdict("A6", a6, tol, "g(t + omega, s, rho y) = rho g(t, s, y)"));
    rep.sampled_L_f = lf;
    rep.sampled_L_g = lg;
    AssumptionEntry e7;
    e7.id = "A7";
    e7.status = CheckStatus::not_checkable;
    e7.tolerance = tol;
    e7.detail = "sampled L_f >= " + std::to_string(lf) + ", L_g >= " + std::to_string(lg);
    rep.entries.push_back(e7);

    // Least-squares line through (||y||, ||f||), then lifted to bound every sample.
    const double m = static_cast<double>(ys.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      sx += ys[i];
      sy += fs[i];
      sxx += ys[i] * ys[i];
      sxy += ys[i] * fs[i];
    }
    const double den = m * sxx - sx * sx;
    double beta = den > 0.0 ? std::max(0.0, (m * sxy - sx * sy) / den) : 0.0;
    double alpha = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) alpha = std::max(alpha, fs[i] - beta * ys[i]);
    rep.fitted_alpha = alpha;
    rep.fitted_beta = beta;
    AssumptionEntry e8;
    e8.id = "A8";
    e8.status = CheckStatus::not_checkable;
    e8.tolerance = tol;
    e8.detail = "fitted alpha = " + std::to_string(alpha) + ", beta = " + std::to_string(beta);
    rep.entries.push_back(e8);
  }

  {  // A9
    rep.growth = estimate_growth(sys.A, w, 256);
    auto e = verdict("A9", std::max(0.0, rep.growth.validation_ratio - 1.0), tol,
                     "M = " + std::to_string(rep.growth.M) + ", gamma = " + std::to_string(rep.growth.gamma));
    rep.entries.push_back(e);
  }
  rep.entries.push_back(verdict("A10", 0.0, tol, "finite-dimensional state space"));
  for (const auto& e : rep.entries)
    if (e.status == CheckStatus::fail) rep.overall = false;
  return rep;
}

ShootingResult shooting_oracle(const SystemSpec& sys, const Vector& y0_guess, const NewtonConfig& cfg) {
  const Eigen::Index n = sys.dim();
  if (y0_guess.size() != n) throw Error(ErrorCode::DimensionMismatch, "initial guess dimension");
  const double w = sys.omega();
  auto F = [&](const Vector& y0) -> Vector {
    return evolve_system(sys, y0, 0.0, w, cfg.flow, cfg.step).value(w) - sys.rho() * y0;
  };
  ShootingResult res;
  res.y0 = y0_guess;
  Vector Fy = F(res.y0);
  // The Jacobian is formed before the convergence test as well, so that a
  // root that is not isolated (singular gap) is reported, not returned.
  for (int it = 0; it <= cfg.max_iter; ++it) {
    Matrix J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = cfg.fd_step * std::max(1.0, std::abs(res.y0(j)));
      Vector yp = res.y0, ym = res.y0;
      yp(j) += h;
      ym(j) -= h;
      J.col(j) = (F(yp) - F(ym)) / (2.0 * h);
    }
    Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(n - 1) <= sv(0) * 1e-10)
      throw Error(ErrorCode::NewtonDiverged, "shooting Jacobian is singular");
    res.residual = Fy.norm() / (1.0 + res.y0.norm());
    if (res.residual <= cfg.tol) return res;
    if (it == cfg.max_iter) break;
    const Vector step = svd.solve(Fy);
    double lambda = 1.0;
    Vector trial = res.y0 - step;
    Vector Ft = F(trial);
    while (Ft.norm() > Fy.norm() && lambda > 1.0 / 64.0) {
      lambda *= 0.5;
      trial = res.y0 - lambda * step;
      Ft = F(trial);
    }
    res.y0 = trial;
    Fy = Ft;
    res.iterations = it + 1;
  }
  throw Error(ErrorCode::NewtonDiverged, "shooting did not converge in " + std::to_string(cfg.max_iter) + " steps");
}

namespace {

Vector rhs_at(const SystemSpec& sys, const PiecewiseTrajectory& traj, double t, const Vector& y, const StepConfig& step) {
  Vector r = sys.A * y;
  if (sys.is_linear()) return r + sys.forcing_at(t);
  const VolterraProblem& p = *sys.problem;
  const Vector z = p.volterra_arg == VolterraArg::at_t ? volterra_at_t(p, sys.schedule, t, y, step)
                                                       : memory_term(sys, t, traj, step);
  return r + p.f(t, y, z);
}

}  // namespace

ValidationReport validate_solution(const SystemSpec& sys, const PiecewiseTrajectory& traj, const ValidationConfig& cfg) {
  const double w = sys.omega();
  const double eps_t = 1e-12 * std::max(1.0, w);
  if (traj.empty() || std::abs(traj.t_begin()) > eps_t || traj.t_end() < w - eps_t)
    throw Error(ErrorCode::ShortTrajectory, "validation needs a trajectory on [0, omega]");
  if (traj.dim() != sys.dim()) throw Error(ErrorCode::DimensionMismatch, "trajectory dimension");
  ValidationReport rep;
  const Matrix& rho = sys.rho();
  const Vector y0 = traj.value(0.0);
  const Vector yw = traj.value(w);
  rep.endpoint_residual = (yw - rho * y0).norm() / (1.0 + y0.norm());

  // Re-simulate one more period from the trajectory's own end state.
  std::vector<double> shifted;
  for (const auto& seg : traj.segments())
    for (double t : seg.times) shifted.push_back(t + w);
  PiecewiseTrajectory extended = traj;
  const PiecewiseTrajectory more = evolve_system(sys, yw, w, 2.0 * w, cfg.flow, cfg.step, shifted, &traj);
  // Kept as a separate segment: the rho-extended forcing may have a kink at omega.
  extended.append(more, true);
  rep.periodicity_residual = periodicity_residual(extended, rho, w);

  const auto& imps = sys.schedule.impulses();
  for (std::size_t k = 0; k < imps.size(); ++k) {
    const Vector left = traj.value(imps[k].tau);
    const Vector right = traj.right_limit(imps[k].tau);
    const double r = (right - left - imps[k].B * left - imps[k].d).norm() / (1.0 + left.norm());
    rep.jump_residuals.push_back(r);
    if (r > cfg.tol) rep.bad_jumps.push_back(static_cast<int>(k + 1));
  }

  // Derivative of the interpolant against A y + f at interior samples.
  double ode = 0.0;
  for (const auto& seg : traj.segments()) {
    if (seg.times.size() < 2) continue;
    const double a = seg.times.front(), b = seg.times.back();
    const double h = 1e-3 * (b - a);
    auto at = [&](double t) { return interpolate_segment(seg, t); };
    const int probes = 32;
    for (int i = 0; i <= probes; ++i) {
      const double t = a + (b - a) * i / probes;
      Vector d;
      if (t - 2.0 * h >= a && t + 2.0 * h <= b) {
        d = (at(t - 2 * h) - 8.0 * at(t - h) + 8.0 * at(t + h) - at(t + 2 * h)) / (12.0 * h);
      } else if (t + 4.0 * h <= b) {
        d = (-25.0 * at(t) + 48.0 * at(t + h) - 36.0 * at(t + 2 * h) + 16.0 * at(t + 3 * h) - 3.0 * at(t + 4 * h)) / (12.0 * h);
      } else {
        d = (25.0 * at(t) - 48.0 * at(t - h) + 36.0 * at(t - 2 * h) - 16.0 * at(t - 3 * h) + 3.0 * at(t - 4 * h)) / (12.0 * h);
      }
      // Evaluate the right-hand side with this segment's own limit at the ends.
      const Vector r = rhs_at(sys, traj, t, at(t), cfg.step);
      ode = std::max(ode, (d - r).norm() / (1.0 + r.norm()));
    }
  }
  rep.ode_residual = ode;
  rep.passed = rep.periodicity_residual <= cfg.tol && rep.endpoint_residual <= cfg.tol && rep.bad_jumps.empty() &&
               rep.ode_residual <= cfg.ode_tol;
  return rep;
}

}  // namespace orps
