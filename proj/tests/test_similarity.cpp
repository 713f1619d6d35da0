#include "doctest.h"

#include "selfsim/harness.hpp"
#include "selfsim/similarity.hpp"

using namespace selfsim;

namespace {

const ProfileSolution& profile_p2() {
  static const ProfileSolution s = solve_profile(ModelParams(2.0));
  return s;
}

}  // namespace

TEST_CASE("property report bookkeeping") {
  PropertyReport r;
  r.name = "x";
  CHECK(r.finish().passed);
  CHECK(r.worst_margin == 0.0);
  PropertyReport s;
  s.record(0.5, {1.0, {}, {}});
  s.record(-0.25, {2.0, {}, {}});
  s.record(0.1, {3.0, {}, {}});
  s.finish();
  CHECK_FALSE(s.passed);
  CHECK(s.worst_margin == -0.25);
  CHECK(*s.witness.zeta == 2.0);
  PropertyReport n;
  n.record(NAN, {});
  CHECK_FALSE(n.finish().passed);
}

TEST_CASE("profile rendered as a frame has zero distance to itself") {
  const ModelParams params(2.0, 1.0);
  for (double t : {0.1, 1.0, 100.0}) {
    const SimilarityFrame f = frame_from_profile(params, profile_p2(), t);
    CHECK(profile_distance(params, f, profile_p2(), -2.0, 2.0) <= 1e-8);
  }
  CHECK_THROWS_AS(frame_from_profile(params, profile_p2(), 0.0), std::invalid_argument);
}

TEST_CASE("similarity frame of a synthetic state") {
  const ModelParams params(2.0, 1.0);
  const SpatialGrid grid(10.0, 101);
  PdeState s{grid, 0.5 * make_stationary<double>(params).values(grid.coordinates()), 4.0, {}};
  s.u[100] = 0.0;
  const SimilarityFrame f = similarity_frame(s, params);
  CHECK(f.size() == 99);  // x = 0 and the zero node are dropped
  CHECK(f.zeta[0] == doctest::Approx(std::log(0.1 / 2.0)));
  CHECK((f.F - 0.5).abs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(profile_distance(params, f, profile_p2(), -6.0, 2.0), std::invalid_argument);
}

TEST_CASE("sandwich holds for the profile itself and rejects b < a") {
  const ModelParams params(2.0, 1.0);
  const double a = make_stationary<double>(params).offset_a;
  const SimilarityFrame f = frame_from_profile(params, profile_p2(), 10.0);
  // upper side is tight; the lower side holds because phi is decreasing
  const SandwichReport r = sandwich_check(params, f, profile_p2(), a, 0.0);
  CHECK(r.upper.worst_margin >= -1e-12);
  CHECK(r.lower.passed);
  CHECK_THROWS_AS(sandwich_check(params, f, profile_p2(), 0.5 * a, 1e-3), std::invalid_argument);
}

TEST_CASE("comparison bracket vanishes at b = a and has the right signs") {
  const ModelParams params(2.0, 1.0);
  const double a = make_stationary<double>(params).offset_a;
  const ProfileEvaluator phi(params, profile_p2());
  for (double x : {0.01, 0.5, 2.0, 10.0}) {
    for (double t : {0.05, 1.0, 30.0}) {
      if (!phi.covers(std::log((x + 2 * a) / std::sqrt(t)))) continue;
      CHECK(std::abs(comparison_bracket(params, phi, a, x, t)) <= 1e-12);
      CHECK(comparison_bracket(params, phi, 0.0, x, t) >= 0.0);
      CHECK(comparison_bracket(params, phi, 2 * a, x, t) <= 0.0);
    }
  }
  const auto samples = comparison_samples(profile_p2(), 2 * a, 500, 9);
  CHECK(samples.size() == 500);
  const ComparisonReports rep = comparison_residuals(params, profile_p2(), 2 * a, samples);
  CHECK(rep.sub.passed);
  CHECK(rep.super.passed);
}

TEST_CASE("seeded sampling is reproducible") {
  const auto s1 = comparison_samples(profile_p2(), 5.0, 50, 123);
  const auto s2 = comparison_samples(profile_p2(), 5.0, 50, 123);
  const auto s3 = comparison_samples(profile_p2(), 5.0, 50, 124);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < 50; ++i) {
    same = same && s1[i].x == s2[i].x && s1[i].t == s2[i].t;
    differs = differs || s1[i].x != s3[i].x;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("theoretical shift is at least the offset") {
  const ModelParams params(2.0, 1.0);
  const TheoreticalShift s = theoretical_b(params, profile_p2());
  CHECK(s.epsilon > 0.0);
  CHECK(s.b >= make_stationary<double>(params).offset_a);
}
