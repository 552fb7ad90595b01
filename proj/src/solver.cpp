#include "orps/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace orps {

Vector periodic_initial_state(const SystemSpec& sys, const QuadratureConfig& quad) {
  if (!sys.is_linear()) throw Error(ErrorCode::PreconditionViolated, "boundary solve needs a linear system");
  const PeriodicKernel kernel(sys);
  const double w = sys.omega();
  std::vector<double> cuts;
  Vector rhs = Vector::Zero(sys.dim());
  for (const Impulse& imp : sys.schedule.impulses()) {
    cuts.push_back(imp.tau);
    rhs += kernel.right_factor(imp.tau) * imp.d;
  }
  if (sys.forcing) {
    auto integrand = [&](double tau) -> Vector { return kernel.right_factor(tau) * sys.forcing_at(tau); };
    rhs += integrate(integrand, 0.0, w, cuts, quad);
  }
  return kernel.gap_inverse() * rhs;
}

PiecewiseTrajectory solve_linear_periodic(const SystemSpec& sys, const QuadratureConfig& quad, const FlowConfig& flow) {
  const Vector y0 = periodic_initial_state(sys, quad);
  FlowConfig cfg = flow;
  cfg.quad = quad;
  return evolve_system(sys, y0, 0.0, sys.omega(), cfg, StepConfig{});
}

Vector memory_term(const SystemSpec& sys, double t, const PiecewiseTrajectory& y, const StepConfig& memory) {
  const VolterraProblem& p = *sys.problem;
  if (!p.g || !(t > 0.0)) return Vector::Zero(sys.dim());
  if (p.volterra_arg == VolterraArg::at_t) return volterra_at_t(p, sys.schedule, t, y.value(t), memory);
  std::vector<double> cuts;
  for (const ImpulseEvent& ev : sys.schedule.events(0.0, t)) cuts.push_back(ev.time);
  std::vector<double> nodes, weights;
  composite_rule(0.0, t, cuts, memory.quad_panels, memory.quad_nodes, nodes, weights);
  Vector z = Vector::Zero(sys.dim());
  for (std::size_t i = 0; i < nodes.size(); ++i) z += weights[i] * p.g(t, nodes[i], y.value(nodes[i]));
  return z;
}

PicardOperator::PicardOperator(const SystemSpec& sys, int panels, int quad_nodes, const StepConfig& memory)
    : sys_(sys), kernel_(sys), memory_(memory) {
  if (panels < 1 || quad_nodes < 1) throw Error(ErrorCode::InvalidArgument, "grid needs panels >= 1 and nodes >= 1");
  const GaussRule& rule = gauss_legendre(quad_nodes);
  const double w = sys.omega();
  std::vector<double> cuts{0.0};
  for (const Impulse& imp : sys.schedule.impulses()) cuts.push_back(imp.tau);
  cuts.push_back(w);
  const std::size_t nseg = cuts.size() - 1;

  // Panels, base nodes and output grid.
  struct Panel {
    double a, b;
    std::size_t first_node;
  };
  std::vector<std::vector<Panel>> panels_of(nseg);
  grid_.assign(nseg, {});
  for (std::size_t j = 0; j < nseg; ++j) {
    const double a = cuts[j], b = cuts[j + 1], h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double pa = a + h * p, pb = (p + 1 == panels) ? b : a + h * (p + 1);
      panels_of[j].push_back({pa, pb, base_tau_.size()});
      grid_[j].push_back(pa);
      const double half = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
      for (int i = 0; i < quad_nodes; ++i) {
        base_tau_.push_back(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
        base_weight_.push_back(half * rule.weights[static_cast<std::size_t>(i)]);
        grid_[j].push_back(base_tau_.back());
      }
    }
    grid_[j].push_back(b);
  }

  std::vector<Matrix> right(base_tau_.size());
  for (std::size_t b = 0; b < base_tau_.size(); ++b) right[b] = kernel_.right_factor(base_tau_[b]);

  rows_.assign(nseg, {});
  for (std::size_t j = 0; j < nseg; ++j) {
    for (std::size_t g = (j == 0 ? 0 : 1); g < grid_[j].size(); ++g) {
      const double t = grid_[j][g];
      Row row;
      row.t = t;
      const Matrix left = kernel_.left_factor(t);
      const Matrix before = kernel_.before_factor(t);
      auto H = [&](double tau, int base) -> Matrix {
        if (tau < t) return before * kernel_.propagator(tau, t);
        return left * (base >= 0 ? right[static_cast<std::size_t>(base)] : kernel_.right_factor(tau));
      };
      for (std::size_t s = 0; s < nseg; ++s) {
        for (const Panel& pn : panels_of[s]) {
          if (s == j && t > pn.a && t < pn.b) {
            // H jumps across tau = t: integrate the two halves separately.
            for (const auto& [lo, hi] : {std::pair{pn.a, t}, std::pair{t, pn.b}}) {
              const double half = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
              for (int i = 0; i < quad_nodes; ++i) {
                const double tau = mid + half * rule.nodes[static_cast<std::size_t>(i)];
                row.nodes.push_back({tau, half * rule.weights[static_cast<std::size_t>(i)], -1});
                row.H.push_back(H(tau, -1));
              }
            }
            continue;
          }
          for (int i = 0; i < quad_nodes; ++i) {
            const int b = static_cast<int>(pn.first_node) + i;
            row.nodes.push_back({base_tau_[static_cast<std::size_t>(b)], base_weight_[static_cast<std::size_t>(b)], b});
            row.H.push_back(H(base_tau_[static_cast<std::size_t>(b)], b));
          }
        }
      }
      row.impulse_sum = Vector::Zero(sys.dim());
      for (const Impulse& imp : sys.schedule.impulses()) row.impulse_sum += kernel_(t, imp.tau).value * imp.d;
      rows_[j].push_back(std::move(row));
    }
  }
}

Vector PicardOperator::forcing(double tau, const PiecewiseTrajectory& y) const {
  if (sys_.is_linear()) return sys_.forcing_at(tau);
  const Vector yt = y.value(tau);
  return sys_.problem->f(tau, yt, memory_term(sys_, tau, y, memory_));
}

PiecewiseTrajectory PicardOperator::apply(const PiecewiseTrajectory& y) const {
  if (!sys_.is_linear() && y.dim() != sys_.dim()) throw Error(ErrorCode::DimensionMismatch, "trajectory dimension");
  std::vector<Vector> F(base_tau_.size());
  for (std::size_t b = 0; b < base_tau_.size(); ++b) {
    F[b] = forcing(base_tau_[b], y);
    if (!F[b].allFinite()) throw Error(ErrorCode::NonFiniteState, "nonlinearity returned NaN/Inf");
  }
  std::vector<TrajectorySegment> segs(rows_.size());
  const auto& imps = sys_.schedule.impulses();
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    auto& seg = segs[j];
    if (j > 0) {
      const Vector& left = segs[j - 1].states.back();
      seg.times.push_back(grid_[j].front());
      seg.states.push_back(left + imps[j - 1].B * left + imps[j - 1].d);
    }
    for (const Row& row : rows_[j]) {
      Vector v = row.impulse_sum;
      for (std::size_t k = 0; k < row.nodes.size(); ++k) {
        const Node& nd = row.nodes[k];
        if (nd.base >= 0) v += nd.weight * (row.H[k] * F[static_cast<std::size_t>(nd.base)]);
        else v += nd.weight * (row.H[k] * forcing(nd.tau, y));
      }
      if (!v.allFinite()) throw Error(ErrorCode::NonFiniteState, "iterate became non-finite");
      seg.times.push_back(row.t);
      seg.states.push_back(std::move(v));
    }
  }
  return PiecewiseTrajectory(std::move(segs));
}

PiecewiseTrajectory PicardOperator::sample(const std::function<Vector(int, double)>& fn) const {
  std::vector<TrajectorySegment> segs(grid_.size());
  for (std::size_t j = 0; j < grid_.size(); ++j)
    for (double t : grid_[j]) {
      segs[j].times.push_back(t);
      segs[j].states.push_back(fn(static_cast<int>(j), t));
    }
  return PiecewiseTrajectory(std::move(segs));
}

PiecewiseTrajectory picard_apply(const SystemSpec& sys, const PiecewiseTrajectory& y, const PicardConfig& cfg) {
  return PicardOperator(sys, cfg.grid, cfg.quad_nodes, cfg.memory).apply(y);
}

double ConvergenceLog::max_rate(int from) const {
  double r = std::numeric_limits<double>::quiet_NaN();
  for (const IterationRecord& rec : records)
    if (rec.level == levels - 1 && rec.iteration >= from && !std::isnan(rec.rate)) r = std::isnan(r) ? rec.rate : std::max(r, rec.rate);
  return r;
}

namespace {

// Sup distance between two grid levels at the times both grids contain
// (panel ends), so no interpolation enters the comparison.
double grid_distance(const PiecewiseTrajectory& fine, const PiecewiseTrajectory& coarse) {
  double d = 0.0;
  const auto& fs = fine.segments();
  const auto& cs = coarse.segments();
  for (std::size_t j = 0; j < fs.size() && j < cs.size(); ++j) {
    const auto& ct = cs[j].times;
    for (std::size_t i = 0; i < fs[j].times.size(); ++i) {
      const double t = fs[j].times[i];
      const auto it = std::lower_bound(ct.begin(), ct.end(), t - 1e-13 * (1.0 + std::abs(t)));
      if (it == ct.end() || std::abs(*it - t) > 1e-13 * (1.0 + std::abs(t))) continue;
      d = std::max(d, (fs[j].states[i] - cs[j].states[static_cast<std::size_t>(it - ct.begin())]).norm());
    }
  }
  return d;
}

double same_grid_distance(const PiecewiseTrajectory& a, const PiecewiseTrajectory& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.segments().size(); ++j)
    for (std::size_t i = 0; i < a.segments()[j].states.size(); ++i)
      d = std::max(d, (a.segments()[j].states[i] - b.segments()[j].states[i]).norm());
  return d;
}

}  // namespace

PicardResult solve_semilinear_picard(const SystemSpec& sys, const PicardConfig& cfg, const PiecewiseTrajectory* start) {
  if (cfg.max_iter < 1 || !(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "Picard needs max_iter >= 1 and tol > 0");
  ConvergenceLog log;
  log.nu_final = cfg.nu;
  const double eps = std::numeric_limits<double>::epsilon();
  std::optional<PiecewiseTrajectory> previous_level;
  const int levels = std::max(1, cfg.max_levels);

  for (int level = 0; level < levels; ++level) {
    const int panels = cfg.grid << level;
    const PicardOperator R(sys, panels, cfg.quad_nodes, cfg.memory);
    PiecewiseTrajectory y;
    if (previous_level) y = R.sample([&](int j, double t) {
      return (j > 0 && t == R.grid()[static_cast<std::size_t>(j)].front()) ? previous_level->right_limit(t)
                                                                           : previous_level->value(t);
    });
    else if (start) y = R.sample([&](int j, double t) {
      return (j > 0 && t == R.grid()[static_cast<std::size_t>(j)].front()) ? start->right_limit(t) : start->value(t);
    });
    else y = R.sample([&](int, double) { return Vector(Vector::Zero(sys.dim())); });

    log.levels = level + 1;
    log.panels = panels;
    log.converged = false;
    double prev_d = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    for (int n = 0; n < cfg.max_iter; ++n) {
      PiecewiseTrajectory next = R.apply(y);
      ++log.applications;
      const double d = same_grid_distance(next, y);
      const double norm = next.sup_norm();
      IterationRecord rec;
      rec.level = level;
      rec.iteration = n;
      rec.distance = d;
      rec.sup_norm = norm;
      // Rates are only meaningful while both distances sit above roundoff.
      const double floor = 1e3 * eps * (1.0 + norm);
      if (n > 0 && prev_d > floor && d > floor) {
        rec.rate = d / prev_d;
        rate = rec.rate;
      } else if (n > 0 && d <= floor) {
        rate = 0.0;
      }
      log.records.push_back(rec);
      if (cfg.nu > 0.0 && norm > log.nu_final) {
        log.nu_escaped = true;
        log.certificate_stale = true;
        while (norm > log.nu_final) log.nu_final *= 2.0;
      }
      y = std::move(next);
      prev_d = d;
      const double r = std::isnan(rate) ? 1.0 : std::min(rate, 0.99);
      const double err = (n == 0 ? 1.0 : std::max(1.0, r / (1.0 - r))) * d;
      if (err <= cfg.tol / 16.0 || d == 0.0) {
        log.converged = true;
        log.iterations = n;
        log.final_distance = d;
        break;
      }
    }
    if (!log.converged) {
      log.final_distance = prev_d;
      throw NoConvergence("Picard iteration did not reach tolerance in " + std::to_string(cfg.max_iter) + " steps", log);
    }
    if (previous_level) {
      log.level_agreement = grid_distance(y, *previous_level) / (1.0 + y.sup_norm());
      if (log.level_agreement <= cfg.tol / 4.0) {
        log.grid_converged = true;
        return {std::move(y), std::move(log)};
      }
    }
    previous_level = std::move(y);
  }
  log.grid_converged = levels == 1;
  return {std::move(*previous_level), std::move(log)};
}

double forcing_sup_at_zero(const SystemSpec& sys, int grid, const StepConfig& memory) {
  const double w = sys.omega();
  const Vector zero = Vector::Zero(sys.dim());
  double m = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double t = w * i / grid;
    if (sys.is_linear()) {
      m = std::max(m, sys.forcing_at(t).norm());
      continue;
    }
    const VolterraProblem& p = *sys.problem;
    const Vector z = volterra_at_t(p, sys.schedule, t, zero, memory);
    m = std::max(m, p.f(t, zero, z).norm());
  }
  return m;
}

namespace {

struct LipschitzSample {
  double f = 0.0;
  double g = 0.0;
};

LipschitzSample sample_lipschitz(const SystemSpec& sys, double nu, int samples, std::uint64_t seed, double rel_step,
                                 const StepConfig& memory) {
  const VolterraProblem& p = *sys.problem;
  const Eigen::Index n = sys.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  LipschitzSample out;
  for (int k = 0; k < samples; ++k) {
    const double t = sys.omega() * unit(rng);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = normal(rng);
    if (y.norm() > 0.0) y *= nu * std::pow(unit(rng), 1.0 / double(n)) / y.norm();
    const Vector z = volterra_at_t(p, sys.schedule, t, y, memory);
    const double hy = rel_step * std::max(1.0, y.norm());
    const double hz = rel_step * std::max(1.0, z.norm());
    Matrix Jy(n, n), Jz(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector e = Vector::Zero(n);
      e(j) = hy;
      Jy.col(j) = (p.f(t, y + e, z) - p.f(t, y - e, z)) / (2.0 * hy);
      e(j) = hz;
      Jz.col(j) = (p.f(t, y, z + e) - p.f(t, y, z - e)) / (2.0 * hz);
    }
    out.f = std::max({out.f, opnorm2(Jy), opnorm2(Jz)});
    if (p.g) {
      const double s = t * unit(rng);
      Matrix Jg(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = hy;
        Jg.col(j) = (p.g(t, s, y + e) - p.g(t, s, y - e)) / (2.0 * hy);
      }
      out.g = std::max(out.g, opnorm2(Jg));
    }
  }
  return out;
}

bool unstable(double a, double b) {
  const double big = std::max(a, b);
  return big > 1e-10 && std::abs(a - b) > 0.5 * big;
}

}  // namespace

Certificate contraction_certificate(const SystemSpec& sys, double nu, const CertificateConfig& cfg) {
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "certificate needs nu > 0");
  Certificate c;
  const GrowthEstimate growth = estimate_growth(sys.A, sys.omega(), cfg.growth_grid, cfg.growth_method);
  c.M = growth.M;
  c.gamma = growth.gamma;
  c.bounds = bounds_from_inputs(bound_inputs(sys, growth), cfg.variant);
  c.C1 = c.bounds.C1;
  c.C2 = c.bounds.C2;
  c.nu = nu;

  if (!sys.is_linear()) {
    const VolterraProblem& p = *sys.problem;
    if (p.lipschitz_f && (p.lipschitz_g || !p.g)) {
      c.L_f = *p.lipschitz_f;
      c.L_g = p.g ? *p.lipschitz_g : 0.0;
    } else {
      const LipschitzSample a = sample_lipschitz(sys, nu, cfg.lipschitz_samples, cfg.seed, 1e-5, cfg.memory);
      const LipschitzSample b = sample_lipschitz(sys, nu, cfg.lipschitz_samples, cfg.seed, 1e-6, cfg.memory);
      if (unstable(a.f, b.f) || unstable(a.g, b.g))
        throw Error(ErrorCode::LipschitzEstimateUnstable, "sampled Lipschitz constants disagree across step refinement");
      c.L_f = p.lipschitz_f ? *p.lipschitz_f : 1.5 * std::max(a.f, b.f);
      c.L_g = p.lipschitz_g ? *p.lipschitz_g : (p.g ? 1.5 * std::max(a.g, b.g) : 0.0);
      c.lipschitz_sampled = true;
    }
  }
  c.L = c.L_f * (1.0 + sys.omega() * c.L_g);
  c.M1 = sys.omega() * c.L_f;
  c.f0 = forcing_sup_at_zero(sys, cfg.f0_grid, cfg.memory);
  c.contraction_ok = c.L >= 0.0 && c.L * c.C2 < 1.0;
  if (c.contraction_ok) c.norm_bound = (c.f0 * c.C2 + c.C1) / (1.0 - c.L * c.C2);
  c.nu_consistent = c.contraction_ok && c.norm_bound <= nu;

  const bool supplied = sys.problem && sys.problem->growth_alpha && sys.problem->growth_beta;
  c.growth_supplied = supplied;
  c.alpha = supplied ? *sys.problem->growth_alpha : c.f0;
  c.beta = supplied ? *sys.problem->growth_beta : c.L;
  c.schauder_ok = c.alpha >= 0.0 && c.beta >= 0.0 && c.beta * c.C2 < 1.0;
  if (c.schauder_ok) c.ball_radius_l = (c.alpha * c.C2 + c.C1) / (1.0 - c.beta * c.C2);
  return c;
}

BallCheckReport existence_ball(const SystemSpec& sys, const Certificate& cert, int samples, const PicardConfig& cfg,
                               std::uint64_t seed) {
  if (!cert.schauder_ok) throw Error(ErrorCode::PreconditionViolated, "invariant ball needs beta C2 < 1");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  BallCheckReport rep;
  rep.l = cert.ball_radius_l;
  rep.samples = samples;
  const PicardOperator R(sys, cfg.grid, cfg.quad_nodes, cfg.memory);
  const Eigen::Index n = sys.dim();
  const std::size_t nseg = R.grid().size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int modes = 4;
  for (int s = 0; s < samples; ++s) {
    // Independent smooth trigonometric profile on each segment.
    std::vector<Matrix> coeff(nseg, Matrix(n, 2 * modes + 1));
    for (auto& c : coeff)
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
    auto raw = [&](int j, double t) -> Vector {
      const auto& g = R.grid()[static_cast<std::size_t>(j)];
      const double x = (t - g.front()) / (g.back() - g.front());
      const Matrix& c = coeff[static_cast<std::size_t>(j)];
      Vector v = c.col(0);
      for (int k = 1; k <= modes; ++k)
        v += c.col(2 * k - 1) * std::cos(k * std::numbers::pi * x) + c.col(2 * k) * std::sin(k * std::numbers::pi * x);
      return v;
    };
    PiecewiseTrajectory y = R.sample(raw);
    const double scale = (s % 4 == 0 ? 1.0 : unit(rng)) * rep.l / std::max(y.sup_norm(), 1e-300);
    for (auto& seg : y.segments())
      for (Vector& v : seg.states) v *= scale;
    const double ratio = R.apply(y).sup_norm() / rep.l;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > 1.0 + 1e-9) ++rep.violations;
  }
  return rep;
}

}  // namespace orps
