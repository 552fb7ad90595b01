#include "orps/kernel.hpp"
#include "../support/corpus.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace orps;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

SystemSpec rho2() { return make_linear_system(scalar(0.0), ImpulseSchedule(1.0, scalar(2.0), {}), [](double) { return Vector::Ones(1); }); }

SystemSpec impulse3() {
  return make_linear_system(scalar(0.0), ImpulseSchedule(1.0, scalar(3.0), {Impulse{0.5, scalar(1.0), Vector::Ones(1), std::nullopt}}));
}

}  // namespace

TEST_CASE("kernel branches on the scalar rho = 2 problem") {
  const SystemSpec sys = rho2();
  for (double t : {0.1, 0.5, 0.9}) {
    for (double tau : {0.05, 0.3, 0.6, 0.95}) {
      const double expect = tau < t ? 2.0 : 1.0;
      const auto g = kernel_H(sys, t, tau);
      const auto c = kernel_H_commuting(sys, t, tau);
      CHECK(g.value(0, 0) == doctest::Approx(expect).epsilon(1e-15));
      CHECK(c.value(0, 0) == doctest::Approx(expect).epsilon(1e-15));
      CHECK((g.branch == KernelBranch::before) == (tau < t));
    }
  }
  CHECK(kernel_H(sys, 0.5, 0.5).branch == KernelBranch::after);
}

TEST_CASE("kernel integral and sum") {
  const SystemSpec sys = rho2();
  CHECK(kernel_integral_numeric(sys, 0.5, QuadratureConfig{}) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(kernel_integral_numeric(sys, 0.0, QuadratureConfig{}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kernel_sum_numeric(sys, 0.5) == 0.0);
}

TEST_CASE("singular gap is reported") {
  const SystemSpec sys = make_linear_system(scalar(0.0), ImpulseSchedule(1.0, scalar(1.0), {}));
  CHECK_THROWS_AS(kernel_H(sys, 0.5, 0.2), Error);
  CHECK_THROWS_AS(kernel_H_commuting(sys, 0.5, 0.2), Error);
}

TEST_CASE("closed-form bounds, scalar cases") {
  const GrowthEstimate flat{};
  SUBCASE("zero growth, rho = 2: C2 = 2, no impulses: C1 = 0") {
    const auto b = bound_general(rho2(), flat);
    CHECK(b.C2 == doctest::Approx(2.0));
    CHECK(b.C2_as_stated == doctest::Approx(2.0));
    CHECK(b.C1 == 0.0);
    CHECK(b.c2_branch == "zero");
    CHECK(b.c1_branch == "nonpos");
  }
  SUBCASE("zero growth, rho = 3, one impulse: C1 = 8") {
    const auto b = bound_general(impulse3(), flat);
    CHECK(b.C1 == doctest::Approx(8.0));
    CHECK(b.C1_as_stated == doctest::Approx(8.0));
  }
  SUBCASE("continuity in gamma at zero") {
    for (double a : {1e-8, -1e-8}) {
      const SystemSpec sys = make_linear_system(scalar(a), ImpulseSchedule(1.0, scalar(2.0), {}));
      const GrowthEstimate g = estimate_growth(sys.A, 1.0, 8);
      BoundInputs in = bound_inputs(sys, g);
      const double c_branch = bounds_from_inputs(in, KernelVariant::general).C2;
      in.gamma = 0.0;
      const double c_zero = bounds_from_inputs(in, KernelVariant::general).C2;
      CHECK(std::abs(c_branch - c_zero) <= 1e-6 * c_zero);
    }
  }
}

TEST_CASE("commuting kernel agrees with the general kernel on commuting families") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto sign : {testing::GrowthSign::negative, testing::GrowthSign::zero, testing::GrowthSign::positive}) {
    auto r = testing::commuting_system(rng, {3, 2, sign, 1.0, false});
    const PeriodicKernel k(r.sys);
    for (int i = 0; i < 100; ++i) {
      const double t = unit(rng), tau = unit(rng);
      const Matrix g = k(t, tau).value;
      const Matrix c = k(t, tau, KernelVariant::commuting).value;
      CHECK(opnorm2(Matrix(g - c)) <= 1e-10 * std::max(1.0, opnorm2(g)));
    }
  }
}

TEST_CASE("bounds dominate the numeric kernel quantities") {
  std::mt19937_64 rng(23);
  for (auto sign : {testing::GrowthSign::negative, testing::GrowthSign::zero, testing::GrowthSign::positive}) {
    auto r = testing::general_system(rng, {4, 3, sign, 1.0, false});
    const GrowthEstimate g = estimate_growth(r.sys.A, 1.0, 256);
    const auto b = bound_general(r.sys, g);
    const PeriodicKernel k(r.sys);
    for (int i = 0; i < 16; ++i) {
      const double t = i / 15.0;
      CHECK(kernel_integral_numeric(k, t, QuadratureConfig{}) <= b.C2 * (1 + 1e-12));
      CHECK(kernel_sum_numeric(k, t) <= b.C1 * (1 + 1e-12));
    }
    CHECK(b.C1_tight <= b.C1);
  }
}
