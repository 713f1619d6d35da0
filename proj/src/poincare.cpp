#include "selfsim/poincare.hpp"

#include <cmath>
#include <stdexcept>

namespace selfsim {

PoincareThresholds poincare_thresholds(const ModelParams& params) {
  const double c = ProfileCoefficients<double>(params.p()).drift;
  const double right = 2.0 * (c + 8.0) + 8.0 * std::sqrt(c + 4.0);
  const double left = 2.0 * c * (1.0 - 1.0 / std::sqrt(2.0));
  return {0.5 * std::log(right), 0.5 * std::log(left)};
}

const char* to_string(Side side) { return side == Side::right ? "right" : "left"; }

TestFunction TestFunction::sample(const BumpSum& bumps, double R, Side side, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("TestFunction::sample: h must be > 0");
  double reach = 4.0 * h;
  for (const auto& b : bumps.bumps) {
    const double far = side == Side::right ? b.center + b.width - R : R - (b.center - b.width);
    reach = std::max(reach, far);
  }
  const auto steps = static_cast<Eigen::Index>(std::ceil(reach / h)) + 2;
  TestFunction f;
  f.zeta.resize(steps + 1);
  f.w.resize(steps + 1);
  f.dw.resize(steps + 1);
  for (Eigen::Index k = 0; k <= steps; ++k) {
    // nodes ascending in zeta on both sides
    const double z = side == Side::right ? R + h * static_cast<double>(k) : R - h * static_cast<double>(steps - k);
    f.zeta[k] = z;
    f.w[k] = bumps.value(z);
    f.dw[k] = bumps.derivative(z);
  }
  return f;
}

namespace {

double trapezoid(const Eigen::ArrayXd& f, double h) {
  const Eigen::Index n = f.size();
  return h * (f.sum() - 0.5 * (f[0] + f[n - 1]));
}

double relative_margin(double lhs, double rhs) {
  const double scale = std::abs(lhs) + std::abs(rhs);
  return scale > 0.0 ? (rhs - lhs) / scale : 0.0;
}

}  // namespace

PoincareReports poincare_check(const ModelParams& params, const TestFunction& w, double R, Side side) {
  const PoincareThresholds th = poincare_thresholds(params);
  if (side == Side::right && !(R >= th.R0)) throw std::invalid_argument("poincare_check: right side needs R >= R0");
  if (side == Side::left && !(R <= th.R0_prime)) throw std::invalid_argument("poincare_check: left side needs R <= R0'");
  const Eigen::Index n = w.zeta.size();
  if (n < 3 || w.w.size() != n || w.dw.size() != n) throw std::invalid_argument("poincare_check: malformed test function");
  const double h = w.zeta[1] - w.zeta[0];
  Eigen::Index at = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0 && std::abs(w.zeta[i] - w.zeta[i - 1] - h) > 1e-9 * h) {
      throw std::invalid_argument("poincare_check: grid must be uniform");
    }
    if (std::abs(w.zeta[i] - R) <= 1e-9 * h) at = i;
  }
  if (at < 0) throw std::invalid_argument("poincare_check: R must be a grid node");
  const Eigen::Index first = side == Side::right ? at : 0;
  const Eigen::Index count = side == Side::right ? n - at : at + 1;
  if (count < 2) throw std::invalid_argument("poincare_check: half-line has fewer than two nodes");
  const Eigen::Index far = side == Side::right ? n - 1 : 0;
  if (w.w[far] != 0.0 || w.dw[far] != 0.0) {
    throw std::domain_error("poincare_check: support reaches the grid end, tail not certified");
  }

  const Eigen::ArrayXd zeta = w.zeta.segment(first, count);
  const Eigen::ArrayXd ww = w.w.segment(first, count);
  const Eigen::ArrayXd dw = w.dw.segment(first, count);
  const Eigen::ArrayXd log_rho = log_weight_rho(params, zeta);
  double top = -INFINITY;
  for (Eigen::Index i = 0; i < count; ++i) {
    if (ww[i] != 0.0 || dw[i] != 0.0) top = std::max(top, log_rho[i]);
  }
  PoincareReports r;
  r.interval.name = std::string("poincare.") + to_string(side) + ".interval";
  r.boundary.name = std::string("poincare.") + to_string(side) + ".boundary";
  if (top == -INFINITY) {  // w vanishes on the half-line
    r.interval.record(0.0, {R, {}, {}});
    r.boundary.record(0.0, {R, {}, {}});
    r.interval.finish();
    r.boundary.finish();
    return r;
  }
  const Eigen::ArrayXd rho = (log_rho - top).exp();
  const double mass = trapezoid(ww.square() * rho, h);
  const double energy = trapezoid(dw.square() * rho, h);
  const Eigen::Index r_local = side == Side::right ? 0 : count - 1;
  const double trace = rho[r_local] * ww[r_local] * ww[r_local];

  const double c = ProfileCoefficients<double>(params.p()).drift;
  const double c_interval = side == Side::right ? 0.5 * std::exp(-2.0 * R) : 8.0 / (c * c);
  const double c_boundary = side == Side::right ? 2.0 * std::exp(-R) : 8.0 / c;
  r.interval.record(relative_margin(mass, c_interval * energy), {R, {}, {}});
  r.boundary.record(relative_margin(trace, c_boundary * energy), {R, {}, {}});
  r.interval.finish();
  r.boundary.finish();
  return r;
}

BumpSum random_bumps(std::mt19937_64& rng, double R, Side side) {
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  std::uniform_real_distribution<double> width(0.25, 1.5);
  std::uniform_real_distribution<double> offset = side == Side::right ? std::uniform_real_distribution<double>(-0.2, 1.5)
                                                                      : std::uniform_real_distribution<double>(-3.0, 0.2);
  BumpSum b;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    const double off = offset(rng);
    const double wid = width(rng);
    b.bumps.push_back({R + off, wid, weight(rng)});
  }
  return b;
}

}  // namespace selfsim
