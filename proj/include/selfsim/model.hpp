// Problem parameters and closed-form stationary solutions of
//   u_t = u_xx - u^p,  u_x(0,t) = -alpha,  u(x,0) = 0.
#ifndef SELFSIM_MODEL_HPP
#define SELFSIM_MODEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace selfsim {

/// Exponent p > 1 and (optional) boundary source strength alpha > 0.
/// An absent alpha describes the sourceless / infinite-source contexts.
class ModelParams {
 public:
  explicit ModelParams(double p, std::optional<double> alpha = std::nullopt) : p_(p), alpha_(alpha) {
    if (!(p > 1.0) || !std::isfinite(p)) {
      throw std::invalid_argument("ModelParams: exponent p must be finite and > 1, got " + std::to_string(p));
    }
    if (alpha_ && (!(*alpha_ > 0.0) || !std::isfinite(*alpha_))) {
      throw std::invalid_argument("ModelParams: alpha must be finite and > 0 when present, got " +
                                  std::to_string(*alpha_));
    }
  }

  double p() const { return p_; }
  bool has_alpha() const { return alpha_.has_value(); }
  const std::optional<double>& alpha_opt() const { return alpha_; }

  double alpha() const {
    if (!alpha_) throw std::invalid_argument("ModelParams: operation requires a source strength alpha");
    return *alpha_;
  }

  /// Boundary flux used by the time stepper; an absent source injects nothing.
  double source_flux() const { return alpha_.value_or(0.0); }

 private:
  double p_;
  std::optional<double> alpha_;
};

/// Coefficients of the self-similar profile equation
///   phi'' + (e^{2z}/2 - drift) phi' + reaction * phi (1 - phi^{p-1}) = 0.
template <typename Scalar = double>
struct ProfileCoefficients {
  Scalar p;
  Scalar drift;        // (p+3)/(p-1)
  Scalar reaction;     // 2(p+1)/(p-1)^2
  Scalar left_rate;    // 2(p+1)/(p-1): 1-phi ~ A e^{left_rate z}
  Scalar right_power;  // (5-p)/(p-1): phi ~ C exp(-e^{2z}/4 + right_power z)
  Scalar right_correction;  // reaction - 2 right_power = 2(p-2)(p-3)/(p-1)^2

  explicit ProfileCoefficients(Scalar p_in) : p(p_in) {
    using std::pow;
    const Scalar q = p - Scalar(1);
    drift = (p + Scalar(3)) / q;
    reaction = Scalar(2) * (p + Scalar(1)) / (q * q);
    left_rate = Scalar(2) * (p + Scalar(1)) / q;
    right_power = (Scalar(5) - p) / q;
    right_correction = reaction - Scalar(2) * right_power;
  }
};

/// base^e for base >= 0. Negative bases are rejected instead of producing NaN;
/// 0^e is 0 for e > 0.
template <typename Scalar>
Scalar positive_pow(Scalar base, Scalar e) {
  using std::pow;
  if (base < Scalar(0)) throw std::domain_error("positive_pow: negative base");
  if (base == Scalar(0)) return e > Scalar(0) ? Scalar(0) : (e == Scalar(0) ? Scalar(1) : Scalar(INFINITY));
  return pow(base, e);
}

/// Amplitude (2(p+1)/(p-1)^2)^{1/(p-1)} shared by v_alpha and v_infinity.
template <typename Scalar>
Scalar stationary_amplitude(Scalar p) {
  using std::pow;
  const Scalar q = p - Scalar(1);
  return pow(Scalar(2) * (p + Scalar(1)) / (q * q), Scalar(1) / q);
}

/// Offset a(p, alpha) such that v(x) = amplitude (a+x)^{-2/(p-1)} has v'(0) = -alpha.
template <typename Scalar>
Scalar stationary_offset(Scalar p, Scalar alpha) {
  using std::pow;
  const Scalar q = p - Scalar(1);
  return pow(Scalar(2), p / (p + Scalar(1))) * pow(p + Scalar(1), Scalar(1) / (p + Scalar(1))) / q *
         pow(alpha, -q / (p + Scalar(1)));
}

/// Closed-form regular stationary solution with its offset cached.
template <typename Scalar = double>
struct ClosedFormStationary {
  Scalar p;
  Scalar alpha;
  Scalar amplitude;
  Scalar offset_a;
  Scalar decay_exponent;  // 2/(p-1)

  /// v(x) = amplitude (a+x)^{-2/(p-1)}, evaluated through logarithms.
  Scalar value(Scalar x) const {
    using std::exp;
    using std::log;
    if (!(x >= Scalar(0))) throw std::domain_error("stationary_profile: x must be >= 0");
    return exp(log(amplitude) - decay_exponent * log(offset_a + x));
  }

  Scalar derivative(Scalar x) const { return -decay_exponent * value(x) / (offset_a + x); }

  template <typename Derived>
  Eigen::ArrayXd values(const Eigen::ArrayBase<Derived>& x) const {
    if ((x < Scalar(0)).any()) throw std::domain_error("stationary_profile: x must be >= 0");
    return (std::log(amplitude) - decay_exponent * (x.derived() + offset_a).log()).exp();
  }
};

template <typename Scalar = double>
ClosedFormStationary<Scalar> make_stationary(const ModelParams& params) {
  const Scalar p = Scalar(params.p());
  const Scalar alpha = Scalar(params.alpha());
  return {p, alpha, stationary_amplitude(p), stationary_offset(p, alpha), Scalar(2) / (p - Scalar(1))};
}

template <typename Scalar = double>
Scalar stationary_profile(const ModelParams& params, Scalar x) {
  return make_stationary<Scalar>(params).value(x);
}

/// v_infinity(x) = amplitude x^{-2/(p-1)}, the alpha -> infinity limit.
template <typename Scalar = double>
Scalar singular_stationary(const ModelParams& params, Scalar x) {
  using std::exp;
  using std::log;
  if (!(x > Scalar(0))) throw std::domain_error("singular_stationary: x must be > 0");
  const Scalar p = Scalar(params.p());
  return exp(log(stationary_amplitude(p)) - Scalar(2) / (p - Scalar(1)) * log(x));
}

/// log rho(z) = e^{2z}/4 - ((p+3)/(p-1)) z.
template <typename Scalar = double>
  requires(!std::is_base_of_v<Eigen::ArrayBase<Scalar>, Scalar>)
Scalar log_weight_rho(const ModelParams& params, Scalar zeta) {
  using std::exp;
  const Scalar p = Scalar(params.p());
  return exp(Scalar(2) * zeta) / Scalar(4) - (p + Scalar(3)) / (p - Scalar(1)) * zeta;
}

template <typename Derived>
Eigen::ArrayXd log_weight_rho(const ModelParams& params, const Eigen::ArrayBase<Derived>& zeta) {
  const double c = (params.p() + 3.0) / (params.p() - 1.0);
  return (2.0 * zeta.derived()).exp() / 4.0 - c * zeta.derived();
}

/// Default cap on log rho before weight_rho refuses to exponentiate.
inline constexpr double kLogWeightCap = 700.0;

template <typename Scalar = double>
Scalar weight_rho(const ModelParams& params, Scalar zeta, Scalar log_cap = Scalar(kLogWeightCap)) {
  using std::exp;
  const Scalar lr = log_weight_rho(params, zeta);
  if (lr > log_cap) throw std::overflow_error("weight_rho: exponent exceeds cap, use log_weight_rho");
  return exp(lr);
}

}  // namespace selfsim

#endif  // SELFSIM_MODEL_HPP
