#include "orps/flow.hpp"

#include "orps/semigroup.hpp"

#include <algorithm>
#include <cmath>

namespace orps {

namespace {

double slack(double t) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)); }

// Pieces [a, b] of (t_begin, t_end] between impulse events.
struct Piece {
  double a, b;
  const ImpulseEvent* jump_at_b;
};

std::vector<Piece> pieces(double t_begin, double t_end, const std::vector<ImpulseEvent>& events) {
  std::vector<Piece> out;
  double a = t_begin;
  for (const ImpulseEvent& ev : events) {
    out.push_back({a, ev.time, &ev});
    a = ev.time;
  }
  out.push_back({a, t_end, nullptr});
  return out;
}

// Extended events in (t_begin, t_end], the last one possibly at t_end.
std::vector<ImpulseEvent> events_through(const ImpulseSchedule& schedule, double t_begin, double t_end) {
  auto ev = schedule.events(t_begin, t_end + 4.0 * slack(t_end));
  while (!ev.empty() && ev.back().time > t_end + 2.0 * slack(t_end)) ev.pop_back();
  return ev;
}

std::vector<double> merge_times(std::vector<double> ts) {
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  for (double t : ts)
    if (out.empty() || t - out.back() > 1e-13 * std::max(1.0, std::abs(t))) out.push_back(t);
  return out;
}

Vector apply_jump(const ImpulseEvent& ev, const Vector& y) { return y + *ev.B * y + ev.d; }

bool ends_on_jump(const std::vector<ImpulseEvent>& events, double t_end) {
  return !events.empty() && std::abs(events.back().time - t_end) <= 2.0 * slack(t_end);
}

}  // namespace

PiecewiseTrajectory evolve_linear(const Matrix& A, const ImpulseSchedule& schedule, const Vector& y0,
                                  const ForcingFn& forcing, double t_begin, double t_end, const FlowConfig& cfg,
                                  const std::vector<double>& sample_times) {
  detail::require_square_finite(A, "generator");
  const Eigen::Index n = A.rows();
  if (y0.size() != n || schedule.dim() != n) throw Error(ErrorCode::DimensionMismatch, "state dimension mismatch");
  if (t_end < t_begin) throw Error(ErrorCode::ReversedInterval, "evolve_linear needs t_begin <= t_end");

  const auto events = events_through(schedule, t_begin, t_end);
  const bool final_jump = ends_on_jump(events, t_end);
  std::vector<TrajectorySegment> segs;
  Vector y = y0;
  for (const Piece& pc : pieces(t_begin, final_jump ? events.back().time : t_end, events)) {
    TrajectorySegment seg;
    std::vector<double> ts{pc.a, pc.b};
    if (pc.b > pc.a) {
      std::vector<double> nodes, weights;
      composite_rule(pc.a, pc.b, {}, cfg.sample_panels, cfg.sample_nodes, nodes, weights);
      ts.insert(ts.end(), nodes.begin(), nodes.end());
      for (int p = 1; p < cfg.sample_panels; ++p) ts.push_back(pc.a + (pc.b - pc.a) * p / cfg.sample_panels);
      for (double s : sample_times)
        if (s > pc.a && s < pc.b) ts.push_back(s);
    }
    ts = merge_times(std::move(ts));
    seg.times.push_back(ts.front());
    seg.states.push_back(y);
    for (std::size_t j = 1; j < ts.size(); ++j) {
      const double lo = ts[j - 1], hi = ts[j];
      Vector next = expm(A, hi - lo) * y;
      if (forcing) {
        auto integrand = [&](double s) -> Vector { return expm(A, hi - s) * forcing(s); };
        next += integrate(integrand, lo, hi, cfg.quad);
      }
      y = std::move(next);
      if (!y.allFinite()) throw Error(ErrorCode::NonFiniteState, "state became non-finite");
      seg.times.push_back(hi);
      seg.states.push_back(y);
    }
    segs.push_back(std::move(seg));
    if (pc.jump_at_b) y = apply_jump(*pc.jump_at_b, y);
  }
  if (final_jump) segs.push_back({{segs.back().times.back()}, {y}});
  return PiecewiseTrajectory(std::move(segs));
}

Vector volterra_at_t(const VolterraProblem& problem, const ImpulseSchedule& schedule, double t, const Vector& y,
                     const StepConfig& cfg) {
  if (!problem.g || !(t > 0.0)) return Vector::Zero(y.size());
  std::vector<double> cuts;
  for (const ImpulseEvent& ev : schedule.events(0.0, t)) cuts.push_back(ev.time);
  std::vector<double> nodes, weights;
  composite_rule(0.0, t, cuts, cfg.quad_panels, cfg.quad_nodes, nodes, weights);
  Vector z = Vector::Zero(y.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) z += weights[i] * problem.g(t, nodes[i], y);
  return z;
}

namespace {

class SemilinearStepper {
 public:
  SemilinearStepper(const Matrix& A, const ImpulseSchedule& schedule, const VolterraProblem& problem,
                    const StepConfig& cfg, const PiecewiseTrajectory* history, const PiecewiseTrajectory& built)
      : A_(A), schedule_(schedule), problem_(problem), cfg_(cfg), history_(history), built_(built) {}

  // One integrating-factor step of size h from (t, y).
  Vector step(double t, const Vector& y, double h) {
    t_n_ = t;
    y_n_ = &y;
    const Matrix e_half = expm(A_, 0.5 * h);
    const Matrix e_full = e_half * e_half;
    if (cfg_.scheme == SemilinearScheme::euler_midpoint) {
      const Vector k1 = rhs(t, y);
      const Vector ym = e_half * (y + 0.5 * h * k1);
      const Vector k2 = rhs(t + 0.5 * h, ym);
      return e_full * y + h * (e_half * k2);
    }
    const Vector k1 = rhs(t, y);
    const Vector y2 = e_half * (y + 0.5 * h * k1);
    const Vector k2 = rhs(t + 0.5 * h, y2);
    const Vector y3 = e_half * y + 0.5 * h * k2;
    const Vector k3 = rhs(t + 0.5 * h, y3);
    const Vector y4 = e_full * y + h * (e_half * k3);
    const Vector k4 = rhs(t + h, y4);
    return e_full * y + (h / 6.0) * (e_full * k1 + 2.0 * (e_half * (k2 + k3)) + k4);
  }

 private:
  Vector rhs(double t, const Vector& y) { return problem_.f(t, y, memory(t, y)); }

  Vector memory(double t, const Vector& y) {
    if (!problem_.g) return Vector::Zero(y.size());
    if (problem_.volterra_arg == VolterraArg::at_t) return volterra_at_t(problem_, schedule_, t, y, cfg_);
    // int_0^{t_n} g(t, s, y(s)) ds from the stored past, trapezoid over [t_n, t].
    Vector z = Vector::Zero(y.size());
    if (t_n_ > 0.0) {
      std::vector<double> cuts;
      for (const ImpulseEvent& ev : schedule_.events(0.0, t_n_)) cuts.push_back(ev.time);
      std::vector<double> nodes, weights;
      composite_rule(0.0, t_n_, cuts, cfg_.quad_panels * 4, cfg_.quad_nodes, nodes, weights);
      const double start = built_.t_begin();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Vector ys = nodes[i] < start ? history_->value(nodes[i]) : built_.value(nodes[i]);
        z += weights[i] * problem_.g(t, nodes[i], ys);
      }
    }
    if (t > t_n_) z += 0.5 * (t - t_n_) * (problem_.g(t, t_n_, *y_n_) + problem_.g(t, t, y));
    return z;
  }

  const Matrix& A_;
  const ImpulseSchedule& schedule_;
  const VolterraProblem& problem_;
  const StepConfig& cfg_;
  const PiecewiseTrajectory* history_;
  const PiecewiseTrajectory& built_;
  double t_n_ = 0.0;
  const Vector* y_n_ = nullptr;
};

}  // namespace

PiecewiseTrajectory evolve_semilinear(const Matrix& A, const ImpulseSchedule& schedule,
                                      const VolterraProblem& problem, const Vector& y0, double t_begin,
                                      double t_end, const StepConfig& cfg, const std::vector<double>& sample_times,
                                      const PiecewiseTrajectory* history) {
  detail::require_square_finite(A, "generator");
  const Eigen::Index n = A.rows();
  if (y0.size() != n || schedule.dim() != n) throw Error(ErrorCode::DimensionMismatch, "state dimension mismatch");
  if (t_end < t_begin) throw Error(ErrorCode::ReversedInterval, "evolve_semilinear needs t_begin <= t_end");
  if (!(cfg.h > 0.0) || !(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "step size and tolerance must be positive");
  if (!problem.f) throw Error(ErrorCode::InvalidArgument, "nonlinearity f is missing");
  if (problem.g && problem.volterra_arg == VolterraArg::at_s && t_begin > 0.0 &&
      (!history || history->t_end() < t_begin - slack(t_begin)))
    throw Error(ErrorCode::InvalidArgument, "memory term at y(s) needs a history covering [0, t_begin]");

  const auto events = events_through(schedule, t_begin, t_end);
  const bool final_jump = ends_on_jump(events, t_end);

  PiecewiseTrajectory traj({TrajectorySegment{{t_begin}, {y0}}});
  SemilinearStepper stepper(A, schedule, problem, cfg, history, traj);
  Vector y = y0;
  double h = cfg.h;
  bool first_piece = true;
  for (const Piece& pc : pieces(t_begin, final_jump ? events.back().time : t_end, events)) {
    if (!first_piece) traj.segments().push_back(TrajectorySegment{{pc.a}, {y}});
    first_piece = false;
    std::vector<double> stops{pc.b};
    for (double s : sample_times)
      if (s > pc.a + slack(s) && s < pc.b - slack(s)) stops.push_back(s);
    stops = merge_times(std::move(stops));

    double t = pc.a;
    for (double stop : stops) {
      while (stop - t > slack(stop)) {
        double trial = std::min(h, stop - t);
        if (stop - t - trial < 1e-3 * trial) trial = stop - t;
        int halvings = 0;
        for (;;) {
          const Vector coarse = stepper.step(t, y, trial);
          const Vector mid = stepper.step(t, y, 0.5 * trial);
          const Vector fine = stepper.step(t + 0.5 * trial, mid, 0.5 * trial);
          if (!fine.allFinite() || !coarse.allFinite()) throw Error(ErrorCode::NonFiniteState, "state became non-finite");
          const double err = (fine - coarse).norm();
          if (err <= cfg.tol * (1.0 + fine.norm())) {
            const bool last = (stop - t - trial) <= slack(stop);
            const double t_next = last ? stop : t + trial;
            auto& seg = traj.segments().back();
            seg.times.push_back(t + 0.5 * trial);
            seg.states.push_back(mid);
            seg.times.push_back(t_next);
            seg.states.push_back(fine);
            y = fine;
            t = t_next;
            if (err < cfg.tol / 64.0 && halvings == 0) h = std::min(cfg.h, 2.0 * h);
            break;
          }
          trial *= 0.5;
          h = trial;
          if (++halvings > cfg.max_halvings || trial < slack(t))
            throw Error(ErrorCode::StepFailure, "step size underflow at t = " + std::to_string(t));
        }
      }
      t = stop;
    }
    if (pc.jump_at_b) y = apply_jump(*pc.jump_at_b, y);
  }
  if (final_jump) traj.segments().push_back(TrajectorySegment{{traj.t_end()}, {y}});
  return traj;
}

PiecewiseTrajectory evolve_system(const SystemSpec& sys, const Vector& y0, double t_begin, double t_end,
                                  const FlowConfig& flow, const StepConfig& step,
                                  const std::vector<double>& sample_times, const PiecewiseTrajectory* history) {
  if (sys.is_linear()) {
    ForcingFn forcing;
    if (sys.forcing) forcing = [&sys](double t) { return sys.forcing_at(t); };
    return evolve_linear(sys.A, sys.schedule, y0, forcing, t_begin, t_end, flow, sample_times);
  }
  return evolve_semilinear(sys.A, sys.schedule, *sys.problem, y0, t_begin, t_end, step, sample_times, history);
}

}  // namespace orps
