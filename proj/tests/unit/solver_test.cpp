#include "orps/solver.hpp"
#include "orps/verifier.hpp"
#include "../support/corpus.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace orps;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
Vector vec1(double v) { return Vector::Constant(1, v); }

SystemSpec rho2() { return make_linear_system(scalar(0.0), ImpulseSchedule(1.0, scalar(2.0), {}), [](double) { return vec1(1.0); }); }

SystemSpec impulse3() {
  return make_linear_system(scalar(0.0), ImpulseSchedule(1.0, scalar(3.0), {Impulse{0.5, scalar(1.0), vec1(1.0), std::nullopt}}));
}

SystemSpec sine(double a, double rho, double eps) {
  VolterraProblem p;
  p.f = [eps](double t, const Vector& y, const Vector&) {
    return Vector(eps * y.array().sin().matrix() + vec1(std::cos(2 * M_PI * t)));
  };
  p.lipschitz_f = eps;
  return make_semilinear_system(scalar(a), ImpulseSchedule(1.0, scalar(rho), {}), p);
}

double sup_error(const PiecewiseTrajectory& y, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (const auto& s : y.samples()) e = std::max(e, std::abs(s.y(0) - (s.side == 'R' ? exact(s.t + 1e-15) : exact(s.t))));
  return e;
}

}  // namespace

TEST_CASE("linear periodic solve, scalar examples") {
  const auto y = solve_linear_periodic(rho2());
  CHECK(sup_error(y, [](double t) { return 1.0 + t; }) <= 1e-12);
  CHECK(y.value(1.0)(0) == doctest::Approx(2.0 * y.value(0.0)(0)));

  const auto z = solve_linear_periodic(impulse3());
  CHECK(periodic_initial_state(impulse3())(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(z.value(0.5)(0) == doctest::Approx(1.0));
  CHECK(z.right_limit(0.5)(0) == doctest::Approx(3.0));
  CHECK(z.value(1.0)(0) == doctest::Approx(3.0));
}

TEST_CASE("homogeneous data give the zero solution") {
  std::mt19937_64 rng(3);
  auto r = testing::commuting_system(rng, {3, 2, testing::GrowthSign::negative, 1.0, false});
  std::vector<Impulse> imps = r.sys.schedule.impulses();
  for (auto& imp : imps) imp.d.setZero();
  const SystemSpec sys = make_linear_system(r.sys.A, ImpulseSchedule(1.0, r.sys.rho(), imps));
  CHECK(solve_linear_periodic(sys).sup_norm() == 0.0);
}

TEST_CASE("R with f independent of y") {
  SUBCASE("f = 0 gives the impulse sum") {
    const SystemSpec sys = impulse3();
    const PicardOperator R(sys, 2, 8);
    const auto a = R.apply(R.sample([](int, double) { return vec1(0.0); }));
    const auto b = R.apply(R.sample([](int, double t) { return vec1(5.0 + t); }));
    CHECK((a.value(0.3) - b.value(0.3)).norm() == 0.0);
    CHECK(a.value(0.3)(0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("constant forcing matches the linear solve") {
    VolterraProblem p;
    p.f = [](double, const Vector&, const Vector&) { return vec1(1.0); };
    const SystemSpec sys = make_semilinear_system(scalar(-0.5), ImpulseSchedule(1.0, scalar(2.0), {}), p);
    const SystemSpec lin = make_linear_system(scalar(-0.5), ImpulseSchedule(1.0, scalar(2.0), {}), [](double) { return vec1(1.0); });
    const auto ry = picard_apply(sys, PicardOperator(sys, 2, 8).sample([](int, double) { return vec1(0.3); }));
    const auto ref = solve_linear_periodic(lin);
    for (double t : {0.0, 0.25, 0.6, 1.0}) CHECK(ry.value(t)(0) == doctest::Approx(ref.value(t)(0)).epsilon(1e-11));
  }
  SUBCASE("fixed point check on y = 1 + t") {
    const SystemSpec sys = rho2();
    const PicardOperator R(sys, 2, 8);
    const auto y = R.sample([](int, double t) { return vec1(1.0 + t); });
    CHECK(sup_error(R.apply(y), [](double t) { return 1.0 + t; }) <= 1e-13);
  }
}

TEST_CASE("Picard iteration") {
  SUBCASE("a linear problem is solved by the first iterate") {
    const auto res = solve_semilinear_picard(rho2());
    CHECK(res.log.converged);
    CHECK(res.log.records.front().iteration == 0);
    CHECK(res.log.records[1].distance <= 1e-13);
    CHECK(sup_error(res.solution, [](double t) { return 1.0 + t; }) <= 1e-12);
  }
  SUBCASE("contractive sine problem matches the shooting oracle") {
    const SystemSpec sys = sine(-1.0, 1.0, 0.2);
    const auto res = solve_semilinear_picard(sys);
    const auto shot = shooting_oracle(sys, res.solution.value(0.0) + vec1(0.1));
    CHECK(std::abs(shot.y0(0) - res.solution.value(0.0)(0)) <= 1e-8);
  }
  SUBCASE("empirical rate respects the certificate") {
    const SystemSpec probe = sine(-1.0, 1.0, 1.0);
    const double C2 = contraction_certificate(probe, 10.0).C2;
    const SystemSpec sys = sine(-1.0, 1.0, 0.5 / C2);
    const auto cert = contraction_certificate(sys, 10.0);
    CHECK(cert.L * cert.C2 == doctest::Approx(0.5));
    CHECK(cert.contraction_ok);
    const auto res = solve_semilinear_picard(sys);
    CHECK(res.log.max_rate() <= 0.5);
    CHECK(res.solution.sup_norm() <= cert.norm_bound);
  }
  SUBCASE("iteration budget exhaustion") {
    PicardConfig cfg;
    cfg.max_iter = 2;
    cfg.tol = 1e-14;
    CHECK_THROWS_AS(solve_semilinear_picard(sine(-1.0, 1.0, 0.5), cfg), NoConvergence);
  }
}

TEST_CASE("certificates") {
  SUBCASE("f = 0") {
    VolterraProblem p;
    p.f = [](double, const Vector& y, const Vector&) { return Vector(Vector::Zero(y.size())); };
    p.lipschitz_f = 0.0;
    const SystemSpec sys = make_semilinear_system(scalar(0.0), impulse3().schedule, p);
    const auto c = contraction_certificate(sys, 5.0);
    CHECK(c.L == 0.0);
    CHECK(c.contraction_ok);
    CHECK(c.norm_bound == doctest::Approx(c.C1));
    CHECK(c.alpha == 0.0);
    CHECK(c.beta == 0.0);
    CHECK(c.ball_radius_l == doctest::Approx(c.C1));
    const auto ball = existence_ball(sys, c, 20);
    CHECK(ball.violations == 0);
  }
  SUBCASE("bounded f with beta = 0") {
    VolterraProblem p;
    p.f = [](double t, const Vector& y, const Vector&) { return Vector(0.5 * y.array().cos().matrix() * std::cos(2 * M_PI * t)); };
    p.lipschitz_f = 0.5;
    p.growth_alpha = 0.5;
    p.growth_beta = 0.0;
    const SystemSpec sys = make_semilinear_system(scalar(-1.0), ImpulseSchedule(1.0, scalar(1.0), {}), p);
    const auto c = contraction_certificate(sys, 5.0);
    CHECK(c.ball_radius_l == doctest::Approx(0.5 * c.C2 + c.C1));
    CHECK(existence_ball(sys, c, 100).violations == 0);
  }
  SUBCASE("independent flags") {
    VolterraProblem p;
    p.f = [](double, const Vector& y, const Vector&) { return Vector(0.01 * y); };
    p.lipschitz_f = 0.01;
    p.growth_alpha = 0.0;
    p.growth_beta = 1e3;
    const SystemSpec sys = make_semilinear_system(scalar(-1.0), ImpulseSchedule(1.0, scalar(1.0), {}), p);
    const auto c = contraction_certificate(sys, 5.0);
    CHECK(c.contraction_ok);
    CHECK_FALSE(c.schauder_ok);
    CHECK_THROWS_AS(existence_ball(sys, c, 10), Error);
  }
  SUBCASE("sampled Lipschitz constant") {
    VolterraProblem p;
    p.f = [](double, const Vector& y, const Vector&) { return Vector(0.3 * y.array().sin().matrix()); };
    const SystemSpec sys = make_semilinear_system(scalar(-1.0), ImpulseSchedule(1.0, scalar(1.0), {}), p);
    const auto c = contraction_certificate(sys, 2.0);
    CHECK(c.lipschitz_sampled);
    CHECK(c.L_f >= 0.3);
    CHECK(c.L_f <= 0.3 * 1.5 + 1e-9);
  }
}
