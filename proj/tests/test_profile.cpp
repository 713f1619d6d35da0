#include "doctest.h"
#include "oracles.hpp"

#include "selfsim/harness.hpp"
#include "selfsim/interpolation.hpp"
#include "selfsim/profile.hpp"
#include "selfsim/tridiagonal.hpp"

using namespace selfsim;

namespace {

const ProfileSolution& profile_p2() {
  static const ProfileSolution s = solve_profile(ModelParams(2.0));
  return s;
}

}  // namespace

TEST_CASE("tridiagonal solve of a hand-checked 4x4 system") {
  Tridiagonal<double> m(4);
  m.diag << 2, 2, 2, 2;
  m.lower << 0, -1, -1, -1;
  m.upper << -1, -1, -1, 0;
  Eigen::VectorXd rhs(4);
  rhs << 1, 0, 0, 1;
  // the solution of this system is all ones
  const Eigen::VectorXd x = solve_tridiagonal(m, rhs);
  for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(1.0).epsilon(1e-15));
  Tridiagonal<double> singular(2);
  CHECK_THROWS(solve_tridiagonal(singular, Eigen::VectorXd::Ones(2)));
}

TEST_CASE("monotone cubic reproduces data and does not overshoot") {
  Eigen::ArrayXd x(5), y(5);
  x << 0, 1, 2, 3, 4;
  y << 0, 0, 1, 1, 1;
  const MonotoneCubic f(x, y);
  for (int i = 0; i < 5; ++i) CHECK(f(x[i]) == doctest::Approx(y[i]));
  for (double t = 0.0; t <= 4.0; t += 0.01) {
    CHECK(f(t) >= -1e-15);
    CHECK(f(t) <= 1.0 + 1e-15);
  }
}

TEST_CASE("shooting classifies extreme amplitudes") {
  const ModelParams params(2.0);
  CHECK(shoot(params, 1e6, -12.0, 3.0).outcome == ShotOutcome::overshoot);
  CHECK(shoot(params, 1e-6, -12.0, 3.0).outcome == ShotOutcome::undershoot);
  CHECK_THROWS_AS(shoot(params, 1.0, -3.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(shoot(params, 0.0, -12.0, 3.0), std::invalid_argument);
}

TEST_CASE("amplitude bisection brackets and converges") {
  const ModelParams params(2.0);
  ProfileTolerances tol;
  const AmplitudeBracket b = bisect_amplitude(params, tol);
  CHECK(b.undershoot <= b.overshoot);
  CHECK(b.overshoot / b.undershoot - 1.0 <= tol.amplitude_rel);
  CHECK(b.amplitude == doctest::Approx(0.0022084).epsilon(1e-4));
}

TEST_CASE("solved profile meets the residual tolerance and shape constraints") {
  const ProfileSolution& s = profile_p2();
  CHECK(s.max_residual <= 1e-8);
  CHECK(s.zeta_min() == -12.0);
  CHECK(s.zeta_max() == 3.0);
  const ProfileCurve& c = s.curve;
  // phi rounds to 1 on the left and 1 - phi to 1 on the right, so
  // strictness is checked on whichever column resolves it
  CHECK((c.phi > 0.0).all());
  CHECK((c.one_minus_phi > 0.0).all());
  for (Eigen::Index i = 1; i < c.size(); ++i) {
    CHECK_MESSAGE((c.one_minus_phi[i] > c.one_minus_phi[i - 1] || c.log_phi[i] < c.log_phi[i - 1]),
                  "zeta = " << c.zeta[i]);
    CHECK(c.phi[i] <= c.phi[i - 1]);
  }
  CHECK(s.collocation_amplitude == doctest::Approx(s.shooting_amplitude_A).epsilon(5e-3));
}

TEST_CASE("collocation from an independent guess converges to the same profile") {
  const ModelParams params(2.0);
  CHECK(collocation_oracle_distance(params, profile_p2(), ProfileTolerances{}) <= 1e-6);
}

TEST_CASE("finite-difference residual of the returned curve") {
  // Independent of the collocation stencil: fourth-order differences of phi.
  const ModelParams params(2.0);
  const ProfileCurve& c = profile_p2().curve;
  const double h = c.zeta[1] - c.zeta[0];
  double worst = 0.0;
  for (Eigen::Index i = 2; i + 2 < c.size(); ++i) {
    const double d1 = (-c.phi[i + 2] + 8 * c.phi[i + 1] - 8 * c.phi[i - 1] + c.phi[i - 2]) / (12 * h);
    const double d2 = (-c.phi[i + 2] + 16 * c.phi[i + 1] - 30 * c.phi[i] + 16 * c.phi[i - 1] - c.phi[i - 2]) / (12 * h * h);
    worst = std::max(worst, std::abs(ode_residual(params, c.zeta[i], c.phi[i], d1, d2)));
  }
  // limited by the second-order collocation error, O(h^2)
  CHECK(worst < 1e-3);
}

TEST_CASE("asymptotic slopes for several exponents") {
  for (double p : {1.5, 2.0, 3.0}) {
    const ProfileSolution s = solve_profile(ModelParams(p));
    CHECK(measured_left_slope(s, -6.0) == doctest::Approx(oracle::left_rate(p)).epsilon(0.02));
    CHECK(measured_right_slope(s, 2.0, 3.0) == doctest::Approx(oracle::right_power(p)).epsilon(0.02));
  }
}

TEST_CASE("solver rejects exponents too close to one") {
  CHECK_THROWS_AS(solve_profile(ModelParams(1.005)), std::invalid_argument);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0.3), std::invalid_argument);
}

TEST_CASE("energy of the minimizer is finite with certified tails") {
  const ModelParams params(2.0);
  const EnergyResult e = energy(params, profile_p2().curve);
  CHECK(e.tails_certified);
  CHECK(std::isfinite(e.value));
  CHECK(e.value == doctest::Approx(-0.034074).epsilon(1e-4));
  CHECK(e.quadrature_error < 1e-8);
}

TEST_CASE("geodesic path endpoints and convexity") {
  const ModelParams params(2.0);
  const ProfileCurve& base = profile_p2().curve;
  std::mt19937_64 rng(3);
  const ProfileCurve other = random_admissible_perturbation(base, rng, 0.5);
  const ProfileCurve g0 = geodesic_path(base, other, 0.0);
  const ProfileCurve g1 = geodesic_path(base, other, 1.0);
  CHECK((g0.phi - base.phi).abs().maxCoeff() < 1e-15);
  CHECK((g1.phi - other.phi).abs().maxCoeff() < 1e-15);
  for (double d : geodesic_second_differences(params, base, other)) CHECK(d > 0.0);
  CHECK(energy(params, other).value > energy(params, base).value);
}

TEST_CASE("perturbations stay admissible") {
  const ProfileCurve& base = profile_p2().curve;
  BumpSum b;
  b.bumps.push_back({1.0, 0.5, 1.0});
  CHECK_THROWS_AS(perturb_profile(base, b, 2.0), std::invalid_argument);
  const ProfileCurve p = perturb_profile(base, b, 0.5);
  CHECK((p.phi > 0.0).all());
  CHECK((p.phi <= 1.0).all());
  CHECK((p.one_minus_phi >= 0.0).all());
}
