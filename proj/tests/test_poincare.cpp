#include "doctest.h"
#include "oracles.hpp"

#include "selfsim/poincare.hpp"

using namespace selfsim;

TEST_CASE("thresholds match the closed forms for p = 2") {
  const PoincareThresholds th = poincare_thresholds(ModelParams(2.0));
  CHECK(std::abs(th.R0 - oracle::kR0_2) <= 1e-12);
  CHECK(std::abs(th.R0_prime - oracle::kR0Prime_2) <= 1e-12);
  CHECK(th.R0 == doctest::Approx(1.956011502714));
  CHECK(th.R0_prime == doctest::Approx(0.537318957847));
}

TEST_CASE("thresholds move toward zero as p grows") {
  double prev_r0 = INFINITY, prev_r0p = INFINITY;
  for (double p : {2.0, 3.0, 5.0, 9.0}) {
    const PoincareThresholds th = poincare_thresholds(ModelParams(p));
    CHECK(th.R0 < prev_r0);
    CHECK(th.R0_prime < prev_r0p);
    prev_r0 = th.R0;
    prev_r0p = th.R0_prime;
  }
}

TEST_CASE("zero test function passes trivially") {
  const ModelParams params(2.0);
  const PoincareThresholds th = poincare_thresholds(params);
  const TestFunction w = TestFunction::sample(BumpSum{}, th.R0, Side::right);
  const PoincareReports r = poincare_check(params, w, th.R0, Side::right);
  CHECK(r.interval.passed);
  CHECK(r.boundary.passed);
}

TEST_CASE("margins are invariant under scaling of w") {
  const ModelParams params(3.0);
  const PoincareThresholds th = poincare_thresholds(params);
  BumpSum b;
  b.bumps.push_back({th.R0 + 0.5, 0.8, 1.0});
  TestFunction w = TestFunction::sample(b, th.R0, Side::right);
  const PoincareReports r1 = poincare_check(params, w, th.R0, Side::right);
  w.w *= 1e3;
  w.dw *= 1e3;
  const PoincareReports r2 = poincare_check(params, w, th.R0, Side::right);
  CHECK(r1.interval.worst_margin == doctest::Approx(r2.interval.worst_margin).epsilon(1e-12));
  CHECK(r1.boundary.worst_margin == doctest::Approx(r2.boundary.worst_margin).epsilon(1e-12));
  CHECK(r1.interval.passed);
}

TEST_CASE("checks reject the wrong side of the threshold") {
  const ModelParams params(2.0);
  const PoincareThresholds th = poincare_thresholds(params);
  const TestFunction w = TestFunction::sample(BumpSum{}, 0.0, Side::right);
  CHECK_THROWS_AS(poincare_check(params, w, 0.0, Side::right), std::invalid_argument);
  const TestFunction wl = TestFunction::sample(BumpSum{}, th.R0, Side::left);
  CHECK_THROWS_AS(poincare_check(params, wl, th.R0, Side::left), std::invalid_argument);
}

TEST_CASE("random test functions pass beyond the thresholds") {
  for (double p : {2.0, 3.0}) {
    const ModelParams params(p);
    const PoincareThresholds th = poincare_thresholds(params);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
      const double R = th.R0 + 0.5;
      const PoincareReports r = poincare_check(params, TestFunction::sample(random_bumps(rng, R, Side::right), R, Side::right),
                                               R, Side::right);
      CHECK(r.interval.passed);
      CHECK(r.boundary.passed);
      const double L = th.R0_prime - 0.5;
      const PoincareReports l = poincare_check(params, TestFunction::sample(random_bumps(rng, L, Side::left), L, Side::left),
                                               L, Side::left);
      CHECK(l.interval.passed);
      CHECK(l.boundary.passed);
    }
  }
}
