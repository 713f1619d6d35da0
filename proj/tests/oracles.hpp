// Independent reference values, derived by hand from the closed forms and
// evaluated here without any library code.
#ifndef SELFSIM_TESTS_ORACLES_HPP
#define SELFSIM_TESTS_ORACLES_HPP

#include <cmath>

namespace oracle {

// v_alpha(x) = A (a + x)^{-2/(p-1)}, A = (2(p+1)/(p-1)^2)^{1/(p-1)} and
// v'(0) = -alpha  =>  a = (2A / ((p-1) alpha))^{(p-1)/(p+1)}.
inline double amplitude(double p) { return std::pow(2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)), 1.0 / (p - 1.0)); }
inline double offset(double p, double alpha) {
  return std::pow(2.0 * amplitude(p) / ((p - 1.0) * alpha), (p - 1.0) / (p + 1.0));
}

// p = 2, alpha = 1: A = 6, a = 12^{1/3}, v(0) = 6 * 12^{-2/3}.
inline const double kA2 = 6.0;
inline const double kOffset2 = std::cbrt(12.0);
inline const double kV0_2 = 6.0 * std::pow(12.0, -2.0 / 3.0);  // 1.1447142426...
// p = 3, alpha = 1: A = sqrt 2, a = 2^{1/4}, v(0) = sqrt 2 / a = 2^{1/4}.
inline const double kA3 = std::sqrt(2.0);
inline const double kOffset3 = std::pow(2.0, 0.25);

// ln rho = e^{2z}/4 - c z with c = (p+3)/(p-1) (c = 5 for p = 2).
inline const double kRho2At0 = std::exp(0.25);                          // 1.2840254...
inline const double kRho2At1 = std::exp(std::exp(2.0) / 4.0 - 5.0);     // 0.0427350...
inline const double kRho2AtMinus1 = std::exp(std::exp(-2.0) / 4.0 + 5.0);  // 153.520...
inline const double kRho2ArgMin = 0.5 * std::log(10.0);                // e^{2z}/2 = c

// Poincare thresholds for p = 2 (c = 5): e^{2R0} = 26 + 24 = 50,
// e^{2R0'} = 10 (1 - 1/sqrt 2).
inline const double kR0_2 = 0.5 * std::log(50.0);
inline const double kR0Prime_2 = 0.5 * std::log(10.0 * (1.0 - 1.0 / std::sqrt(2.0)));

// Profile-equation constants.
inline double drift(double p) { return (p + 3.0) / (p - 1.0); }
inline double reaction(double p) { return 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)); }
inline double left_rate(double p) { return 2.0 * (p + 1.0) / (p - 1.0); }
inline double right_power(double p) { return (5.0 - p) / (p - 1.0); }

}  // namespace oracle

#endif  // SELFSIM_TESTS_ORACLES_HPP
