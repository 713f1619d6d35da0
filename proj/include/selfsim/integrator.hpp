// Embedded Dormand-Prince 5(4) stepper with scaled error control.
#ifndef SELFSIM_INTEGRATOR_HPP
#define SELFSIM_INTEGRATOR_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfsim {

struct StepControl {
  double rtol = 1e-12;
  /// Absolute floor added to the running state scale. The effective absolute
  /// tolerance per component is rtol * max(|y| seen so far) + atol_floor, so
  /// solutions that start at 1e-40 are still integrated to relative accuracy.
  double atol_floor = 1e-300;
  double min_step = 1e-14;
  double max_step = 0.25;
};

/// Adaptive explicit RK integrator for autonomous-in-form systems
/// y' = f(t, y) with fixed-size Eigen state.
template <int N>
class DormandPrince {
 public:
  using State = Eigen::Matrix<double, N, 1>;

  explicit DormandPrince(StepControl control) : control_(control) {}

  /// Attempts steps from (t, y) until one is accepted; updates t, y, h.
  /// The returned flag is false if the step size underflowed.
  template <typename Rhs>
  bool advance(const Rhs& f, double& t, State& y, double& h, double t_limit) {
    scale_ = scale_.cwiseMax(y.cwiseAbs());
    while (true) {
      const double step = std::min(h, t_limit - t);
      if (step < control_.min_step && t_limit - t > control_.min_step) return false;

      const State k1 = f(t, y);
      const State k2 = f(t + c2 * step, y + step * (a21 * k1));
      const State k3 = f(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
      const State k4 = f(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      const State k5 = f(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const State k6 = f(t + step, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const State y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const State k7 = f(t + step, y5);
      const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double norm = 0.0;
      for (int i = 0; i < N; ++i) {
        const double sc = control_.rtol * std::max({scale_[i], std::abs(y5[i]), std::abs(y[i])}) + control_.atol_floor;
        norm = std::max(norm, std::abs(err[i]) / sc);
      }
      if (!std::isfinite(norm)) {
        h = step / 4;
        if (h < control_.min_step) return false;
        continue;
      }
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        t += step;
        y = y5;
        h = std::min(step * factor, control_.max_step);
        return true;
      }
      h = step * factor;
      if (h < control_.min_step) return false;
    }
  }

 private:
  StepControl control_;
  State scale_ = State::Zero();

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace selfsim

#endif  // SELFSIM_INTEGRATOR_HPP
