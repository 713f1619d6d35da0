// Weighted Poincare and boundary-trace inequalities for d mu = rho d zeta,
// checked by quadrature on compactly supported test functions.
#ifndef SELFSIM_POINCARE_HPP
#define SELFSIM_POINCARE_HPP

#include "selfsim/model.hpp"
#include "selfsim/profile.hpp"
#include "selfsim/similarity.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace selfsim {

struct PoincareThresholds {
  double R0;        // right-side inequalities hold for R >= R0
  double R0_prime;  // left-side inequalities hold for R <= R0_prime
};

/// Closed forms of the sufficient conditions, with c = (p+3)/(p-1):
///   8 e^{2R} <= (e^{2R}/2 - c)^2  =>  e^{2 R0} = 2(c+8) + 8 sqrt(c+4),
///   e^{2R} <= 2c (1 - 1/sqrt 2)   =>  e^{2 R0'} = 2c (1 - 1/sqrt 2).
PoincareThresholds poincare_thresholds(const ModelParams& params);

enum class Side { right, left };

const char* to_string(Side side);

/// w and w' on a uniform grid. The grid must contain R as a node.
struct TestFunction {
  Eigen::ArrayXd zeta;
  Eigen::ArrayXd w;
  Eigen::ArrayXd dw;

  /// Samples a bump sum on R + k h covering the bumps' support on `side`.
  static TestFunction sample(const BumpSum& bumps, double R, Side side, double h = 1.0 / 512.0);
};

struct PoincareReports {
  PropertyReport interval;  // int w^2 dmu <= C int w'^2 dmu over the half-line
  PropertyReport boundary;  // rho(R) w(R)^2 <= C' int w'^2 dmu
};

/// Right: C = e^{-2R}/2, C' = 2 e^{-R} on [R, inf). Left: C = 8/c^2,
/// C' = 8/c on (-inf, R]. Margins are (rhs - lhs)/(rhs + lhs), both sides
/// scaled by the largest rho on the half-line so nothing overflows.
PoincareReports poincare_check(const ModelParams& params, const TestFunction& w, double R, Side side);

/// 1 to 5 mollified Gaussian bumps with random centres near R, widths and
/// signed weights; every bump overlaps the half-line beyond R.
BumpSum random_bumps(std::mt19937_64& rng, double R, Side side);

}  // namespace selfsim

#endif  // SELFSIM_POINCARE_HPP
