#include "doctest.h"
#include "oracles.hpp"

#include "selfsim/model.hpp"
#include "selfsim/profile.hpp"

#include <random>

using namespace selfsim;

TEST_CASE("stationary constants match the hand-derived values") {
  const auto v2 = make_stationary<double>(ModelParams(2.0, 1.0));
  CHECK(v2.amplitude == doctest::Approx(oracle::kA2).epsilon(1e-15));
  CHECK(v2.offset_a == doctest::Approx(oracle::kOffset2).epsilon(1e-14));
  CHECK(v2.value(0.0) == doctest::Approx(oracle::kV0_2).epsilon(1e-14));
  CHECK(v2.value(0.0) == doctest::Approx(1.144714242553).epsilon(1e-12));

  const auto v3 = make_stationary<double>(ModelParams(3.0, 1.0));
  CHECK(v3.amplitude == doctest::Approx(oracle::kA3).epsilon(1e-15));
  CHECK(v3.offset_a == doctest::Approx(oracle::kOffset3).epsilon(1e-14));
  CHECK(v3.value(0.0) == doctest::Approx(oracle::kOffset3).epsilon(1e-14));
}

TEST_CASE("stationary profile solves v'' = v^p") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const ModelParams params(p, 0.7);
    for (double x : {0.0, 0.5, 3.0, 40.0}) {
      const long double h = 1e-3L;
      const long double xl = x + 2 * h;  // stay inside x >= 0
      const long double vm = stationary_profile<long double>(params, xl - h);
      const long double v0 = stationary_profile<long double>(params, xl);
      const long double vp = stationary_profile<long double>(params, xl + h);
      const long double d2 = (vp - 2 * v0 + vm) / (h * h);
      CHECK(static_cast<double>(d2 / std::pow(v0, static_cast<long double>(p))) == doctest::Approx(1.0).epsilon(1e-5));
    }
  }
}

TEST_CASE("stationary profile at x = 0 increases with alpha") {
  double prev = 0.0;
  for (double alpha : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double v0 = stationary_profile(ModelParams(2.0, alpha), 0.0);
    CHECK(v0 > prev);
    prev = v0;
  }
}

TEST_CASE("stationary offset agrees with the independent formula") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> P(1.05, 8.0), Al(0.01, 50.0);
  for (int i = 0; i < 50; ++i) {
    const double p = P(rng), alpha = Al(rng);
    CHECK(make_stationary<double>(ModelParams(p, alpha)).offset_a == doctest::Approx(oracle::offset(p, alpha)).epsilon(1e-12));
  }
}

TEST_CASE("singular stationary solution is the a -> 0 limit") {
  const ModelParams params(2.0, 1.0);
  CHECK(singular_stationary(params, 2.0) == doctest::Approx(6.0 / 4.0));
  CHECK_THROWS_AS(singular_stationary(params, 0.0), std::domain_error);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ModelParams(1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(2.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(2.0).alpha(), std::invalid_argument);
  CHECK(ModelParams(2.0).source_flux() == 0.0);
  CHECK_THROWS_AS(stationary_profile(ModelParams(2.0, 1.0), -1e-9), std::domain_error);
}

TEST_CASE("weight rho values and minimum") {
  const ModelParams params(2.0);
  CHECK(weight_rho(params, 0.0) == doctest::Approx(oracle::kRho2At0).epsilon(1e-14));
  CHECK(weight_rho(params, 1.0) == doctest::Approx(oracle::kRho2At1).epsilon(1e-13));
  CHECK(weight_rho(params, -1.0) == doctest::Approx(oracle::kRho2AtMinus1).epsilon(1e-13));
  CHECK(weight_rho(params, 0.0) == doctest::Approx(1.284025417));
  CHECK(weight_rho(params, 1.0) == doctest::Approx(0.0427350).epsilon(1e-5));
  CHECK(weight_rho(params, -1.0) == doctest::Approx(153.520).epsilon(1e-5));
  const double zmin = oracle::kRho2ArgMin;
  CHECK(log_weight_rho(params, zmin) < log_weight_rho(params, zmin - 1e-3));
  CHECK(log_weight_rho(params, zmin) < log_weight_rho(params, zmin + 1e-3));
  CHECK_THROWS_AS(weight_rho(params, 4.0), std::overflow_error);  // e^8/4 - 20 > 700
  CHECK(std::isfinite(log_weight_rho(params, 4.0)));
}

TEST_CASE("profile coefficients") {
  for (double p : {1.5, 2.0, 3.0, 7.0}) {
    const ProfileCoefficients<double> k(p);
    CHECK(k.drift == doctest::Approx(oracle::drift(p)));
    CHECK(k.reaction == doctest::Approx(oracle::reaction(p)));
    CHECK(k.left_rate == doctest::Approx(oracle::left_rate(p)));
    CHECK(k.right_power == doctest::Approx(oracle::right_power(p)));
  }
}

TEST_CASE("ode residual by hand and by finite differences") {
  const ModelParams params(2.0);
  // p = 2, z = 0, phi = 1/2: 6 * 1/2 * 1/2 = 1.5
  CHECK(ode_residual(params, 0.0, 0.5, 0.0, 0.0) == doctest::Approx(1.5));
  CHECK(ode_residual(params, 0.0, 1.0, 0.0, 0.0) == 0.0);
  CHECK(ode_residual(params, 0.0, 0.0, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(ode_residual(params, 0.0, -0.1, 0.0, 0.0), std::domain_error);
  // e^{2z}/2 - c at z = ln 2 is 2 - 5 = -3
  CHECK(ode_residual(params, std::log(2.0), 1.0, 1.0, 0.0) == doctest::Approx(-3.0));
}

TEST_CASE("left and right asymptotic forms") {
  const ModelParams params(2.0);
  const LeftAsymptote l = left_asymptote(params, 1.0, -2.0);
  CHECK(l.one_minus_phi == doctest::Approx(std::exp(-12.0)));
  CHECK(l.phi == doctest::Approx(1.0 - std::exp(-12.0)));
  CHECK(l.dphi == doctest::Approx(-6.0 * std::exp(-12.0)));
  CHECK_THROWS_AS(left_asymptote(params, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(left_asymptote(params, -1.0, -2.0), std::invalid_argument);

  // phi = exp(-e^{2z}/4 + 3z) at z = 2 is e^{-13.65} e^6 = 4.766e-4
  const RightAsymptote r = right_asymptote(params, 1.0, 2.0);
  CHECK(r.phi == doctest::Approx(std::exp(-std::exp(4.0) / 4.0 + 6.0)));
  CHECK(r.phi == doctest::Approx(4.766e-4).epsilon(1e-3));
  CHECK(r.log_phi == doctest::Approx(-std::exp(4.0) / 4.0 + 6.0));
  // at z = 1 the form exceeds 1 and is rejected
  CHECK_THROWS_AS(right_asymptote(params, 1.0, 1.0), std::domain_error);
}
