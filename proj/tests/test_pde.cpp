#include "doctest.h"

#include "selfsim/pde.hpp"

#include <vector>

using namespace selfsim;

TEST_CASE("grid geometry and validation") {
  const SpatialGrid g(10.0, 101);
  CHECK(g.dx() == doctest::Approx(0.1));
  CHECK(g.x(100) == doctest::Approx(10.0));
  CHECK(g.coordinates().size() == 101);
  CHECK_THROWS_AS(SpatialGrid(10.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(SpatialGrid(-1.0, 101), std::invalid_argument);
}

TEST_CASE("zero source keeps the zero solution") {
  const ModelParams params(2.0);
  PdeState s = init_state(params, SpatialGrid(20.0, 129));
  const double times[] = {0.5, 1.0};
  const auto snaps = run_until(s, params, 1.0, times);
  REQUIRE(snaps.size() == 2);
  for (const PdeState& st : snaps) CHECK(st.u.abs().maxCoeff() == 0.0);
}

TEST_CASE("one step from zero injects mass through the boundary") {
  const ModelParams params(2.0, 1.0);
  const PdeState s0 = init_state(params, SpatialGrid(10.0, 201));
  const double dt = 1e-4;
  const PdeState s1 = step(s0, params, dt);
  CHECK(s1.t == doctest::Approx(dt));
  CHECK((s1.u >= 0.0).all());
  CHECK(s1.u[0] > 0.0);
  CHECK(s1.mass() == doctest::Approx(dt).epsilon(0.05));
  CHECK(s1.ledger.injected == doctest::Approx(dt));
  CHECK_THROWS_AS(step(s0, params, 0.0), std::invalid_argument);
}

TEST_CASE("stationary solution is nearly a fixed point") {
  const ModelParams params(2.0, 1.0);
  const SpatialGrid grid(50.0, 1025);
  const auto v = make_stationary<double>(params);
  PdeState s = init_state(params, grid);
  s.u = v.values(grid.coordinates());
  s.u[grid.nodes() - 1] = 0.0;
  const double dt = 1e-3;
  const PdeState next = step(s, params, dt);
  // |u_t| away from the truncated far boundary is bounded by the O(dx)
  // error of the ghost-node flux row; v'' = v^p is 1.31 at x = 0.
  for (Eigen::Index i = 0; i < grid.nodes() / 2; ++i) CHECK(std::abs(next.u[i] - s.u[i]) / dt < 0.05);
  for (Eigen::Index i = 8; i < grid.nodes() / 2; ++i) CHECK(std::abs(next.u[i] - s.u[i]) / dt < 1e-3);
}

TEST_CASE("run_until hits snapshot times exactly and grows monotonically") {
  const ModelParams params(2.0, 1.0);
  PdeState s = init_state(params, SpatialGrid(20.0, 257));
  const std::vector<double> times{0.1, 0.3, 1.0};
  const auto snaps = run_until(s, params, 1.0, times);
  REQUIRE(snaps.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(snaps[k].t == times[k]);
  CHECK(s.t == 1.0);
  for (std::size_t k = 1; k < 3; ++k) CHECK((snaps[k].u >= snaps[k - 1].u).all());
  const double bad[] = {0.5, 0.2};
  PdeState s2 = init_state(params, SpatialGrid(20.0, 257));
  CHECK_THROWS_AS(run_until(s2, params, 1.0, bad), std::invalid_argument);
}

TEST_CASE("flux balance closes on a short run") {
  const ModelParams params(3.0, 2.0);
  PdeState s = init_state(params, SpatialGrid(30.0, 513));
  const double times[] = {0.25, 1.0, 2.0};
  const auto snaps = run_until(s, params, 2.0, times);
  const auto balance = flux_balance(params, snaps);
  REQUIRE(balance.size() == 3);
  CHECK(balance[0].t0 == 0.0);
  for (const BalanceInterval& b : balance) {
    CHECK(b.source == 2.0);
    CHECK(std::abs(b.defect) <= 1e-3 * 2.0);
  }
}
