#include "orps/flow.hpp"
#include "../support/corpus.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace orps;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
Vector vec1(double v) { return Vector::Constant(1, v); }

ImpulseSchedule one_impulse(double rho, double b, double d) {
  return ImpulseSchedule(1.0, scalar(rho), {Impulse{0.5, scalar(b), vec1(d), std::nullopt}});
}

}  // namespace

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(ImpulseSchedule(1.0, scalar(1), {Impulse{1.0, scalar(0), vec1(0), std::nullopt}}), Error);
  CHECK_THROWS_AS(ImpulseSchedule(1.0, scalar(1),
                                  {Impulse{0.6, scalar(0), vec1(0), std::nullopt}, Impulse{0.4, scalar(0), vec1(0), std::nullopt}}),
                  Error);
  CHECK_THROWS_AS(ImpulseSchedule(-1.0, scalar(1), {}), Error);
  CHECK_THROWS_AS(ImpulseSchedule(1.0, Matrix::Identity(2, 2), {Impulse{0.5, scalar(0), vec1(0), std::nullopt}}), Error);
}

TEST_CASE("impulse counting uses a strict window") {
  const auto s = one_impulse(2.0, 1.0, 1.0);
  CHECK(impulse_count(s, 0.0, 1.0) == 1);
  CHECK(impulse_count(s, 0.5, 1.0) == 0);
  CHECK(impulse_count(s, 0.0, 2.25) == 2);
  CHECK(impulse_count(s, 0.0, 0.5) == 0);
}

TEST_CASE("extended jump vectors follow d_{k+m} = rho d_k") {
  const auto s = one_impulse(2.0, 1.0, 1.0);
  CHECK(s.d_extended(0, 0)(0) == 1.0);
  CHECK(s.d_extended(0, 1)(0) == 2.0);
  CHECK(s.d_extended(0, 2)(0) == 4.0);
  const auto ev = s.events(0.0, 2.25);
  REQUIRE(ev.size() == 2);
  CHECK(ev[1].time == doctest::Approx(1.5));
  CHECK(ev[1].d(0) == 2.0);
}

TEST_CASE("transition products") {
  const auto s = one_impulse(2.0, 1.0, 1.0);
  CHECK(transition_product(s, 0.6, 0.9)(0, 0) == 1.0);
  CHECK(transition_product(s, 0.0, 1.0)(0, 0) == 2.0);
  CHECK(transition_product(s, 0.5, 1.0)(0, 0) == 1.0);
  CHECK(transition_product_from(s, 0.5, 1.0)(0, 0) == 2.0);

  SUBCASE("two impulses compose later-on-the-left") {
    Matrix b1(2, 2), b2(2, 2);
    b1 << 0, 1, 0, 0;
    b2 << 0, 0, 1, 0;
    const ImpulseSchedule two(1.0, Matrix::Identity(2, 2),
                              {Impulse{0.3, b1, Vector::Zero(2), std::nullopt}, Impulse{0.6, b2, Vector::Zero(2), std::nullopt}});
    const Matrix E = Matrix::Identity(2, 2);
    CHECK((transition_product(two, 0.0, 1.0) - (E + b2) * (E + b1)).norm() == 0.0);
    // Composition of the two one-impulse flows gives the same matrix.
    const Vector y0 = Vector::Ones(2);
    const auto traj = evolve_linear(Matrix::Zero(2, 2), two, y0, {}, 1.0);
    CHECK((traj.value(1.0) - (E + b2) * (E + b1) * y0).norm() <= 1e-15);
  }
}

TEST_CASE("linear flow examples") {
  SUBCASE("constant state") {
    const ImpulseSchedule s(1.0, Matrix::Identity(2, 2), {});
    Vector v(2);
    v << 1.5, -2.0;
    const auto traj = evolve_linear(Matrix::Zero(2, 2), s, v, {}, 3.0);
    for (const auto& seg : traj.segments())
      for (const auto& y : seg.states) CHECK((y - v).norm() == 0.0);
    // Between samples the interpolant reproduces constants up to rounding.
    for (double t : {0.0, 0.7, 2.9, 3.0}) CHECK((traj.value(t) - v).norm() <= 16 * kEps * v.norm());
  }
  SUBCASE("one impulse") {
    const auto s = one_impulse(3.0, 1.0, 1.0);
    const auto traj = evolve_linear(scalar(0.0), s, vec1(1.0), {}, 1.0);
    CHECK(traj.value(0.25)(0) == 1.0);
    CHECK(traj.value(0.5)(0) == 1.0);
    CHECK(traj.right_limit(0.5)(0) == 3.0);
    CHECK(traj.value(0.75)(0) == 3.0);
    CHECK(traj.value(1.0)(0) == 3.0);
    CHECK(traj.jump_times().size() == 1);
  }
  SUBCASE("pure exponential") {
    const ImpulseSchedule s(1.0, scalar(1.0), {});
    const auto traj = evolve_linear(scalar(1.0), s, vec1(1.0), {}, std::log(2.0));
    CHECK(traj.terminal()(0) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("forced") {
    const ImpulseSchedule s(1.0, scalar(2.0), {});
    const auto traj = evolve_linear(scalar(-1.0), s, vec1(0.0), [](double) { return vec1(1.0); }, 1.0);
    CHECK(traj.value(0.4)(0) == doctest::Approx(1.0 - std::exp(-0.4)).epsilon(1e-13));
  }
}

TEST_CASE("semilinear flow with a memory term evaluated at t") {
  const double lambda = 2.0 * std::log(2.0);
  VolterraProblem p;
  p.f = [lambda](double, const Vector&, const Vector& z) { return Vector(lambda * z); };
  p.g = [](double, double, const Vector& y) { return y; };
  const ImpulseSchedule s(1.0, scalar(2.0), {});
  const auto traj = evolve_semilinear(scalar(0.0), s, p, vec1(1.0), 1.0);
  CHECK(traj.terminal()(0) == doctest::Approx(2.0).epsilon(1e-9));
  for (double t : {0.1, 0.37, 0.8})
    CHECK(traj.value(t)(0) == doctest::Approx(std::exp(lambda * t * t / 2)).epsilon(1e-9));

  SUBCASE("a zero impulse leaves the output unchanged") {
    const ImpulseSchedule z(1.0, scalar(2.0), {Impulse{0.5, scalar(0.0), vec1(0.0), std::nullopt}});
    const auto traj2 = evolve_semilinear(scalar(0.0), z, p, vec1(1.0), 1.0);
    CHECK(traj2.terminal()(0) == doctest::Approx(traj.terminal()(0)).epsilon(1e-10));
  }
}

TEST_CASE("semilinear flow with zero nonlinearity matches the linear flow") {
  std::mt19937_64 rng(5);
  auto r = testing::commuting_system(rng, {3, 2, testing::GrowthSign::negative, 1.0, false});
  VolterraProblem p;
  p.f = [](double, const Vector& y, const Vector&) { return Vector(Vector::Zero(y.size())); };
  const Vector y0 = testing::random_vector(rng, 3);
  const auto a = evolve_linear(r.sys.A, r.sys.schedule, y0, {}, 1.7);
  const auto b = evolve_semilinear(r.sys.A, r.sys.schedule, p, y0, 1.7);
  for (double t : {0.2, 0.9, 1.3, 1.7}) CHECK((a.value(t) - b.value(t)).norm() <= 1e-10 * (1 + a.value(t).norm()));
}

TEST_CASE("periodicity residual") {
  auto make = [](auto fn, double t_end) {
    TrajectorySegment seg;
    for (int i = 0; i <= 400; ++i) {
      const double t = t_end * i / 400;
      seg.times.push_back(t);
      seg.states.push_back(vec1(fn(t)));
    }
    return PiecewiseTrajectory({seg});
  };
  CHECK(periodicity_residual(make([](double) { return 1.0; }, 2.0), scalar(1.0), 1.0) <= 16 * kEps);
  CHECK(periodicity_residual(make([](double t) { return std::exp(t * std::log(2.0)); }, 2.0), scalar(2.0), 1.0) <= 1e-12);
  // sup |e^{t+1} - 2 e^t| / (1 + e^t) is attained at t = 1.
  const double expect = (std::exp(1.0) - 2.0) * std::exp(1.0) / (1.0 + std::exp(1.0));
  CHECK(periodicity_residual(make([](double t) { return std::exp(t); }, 2.0), scalar(2.0), 1.0) ==
        doctest::Approx(expect).epsilon(1e-8));
  CHECK_THROWS_AS(periodicity_residual(make([](double) { return 1.0; }, 1.5), scalar(1.0), 1.0), Error);
}

TEST_CASE("trajectory sample listing round-trips") {
  const auto s = one_impulse(3.0, 1.0, 1.0);
  const auto traj = evolve_linear(scalar(0.5), s, vec1(1.0), {}, 1.0);
  const auto rows = traj.samples();
  int left = 0, right = 0;
  for (const auto& r : rows) {
    left += r.side == 'L';
    right += r.side == 'R';
  }
  CHECK(left == 1);
  CHECK(right == 1);
  const auto back = trajectory_from_samples(rows);
  for (double t : {0.1, 0.5, 0.77}) CHECK((back.value(t) - traj.value(t)).norm() == 0.0);
  CHECK((back.right_limit(0.5) - traj.right_limit(0.5)).norm() == 0.0);
}
