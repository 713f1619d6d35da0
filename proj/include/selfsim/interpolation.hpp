// Shape-preserving (Fritsch-Carlson) and Hermite cubic interpolation.
#ifndef SELFSIM_INTERPOLATION_HPP
#define SELFSIM_INTERPOLATION_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfsim {

/// Piecewise cubic Hermite interpolant on strictly increasing nodes. When no
/// slopes are supplied they are chosen by the monotone (PCHIP) rule, so
/// monotone data yields a monotone interpolant without overshoots.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(Eigen::ArrayXd x, Eigen::ArrayXd y) : x_(std::move(x)), y_(std::move(y)) {
    check_nodes();
    slopes_ = pchip_slopes(x_, y_);
  }

  MonotoneCubic(Eigen::ArrayXd x, Eigen::ArrayXd y, Eigen::ArrayXd slopes)
      : x_(std::move(x)), y_(std::move(y)), slopes_(std::move(slopes)) {
    check_nodes();
    if (slopes_.size() != x_.size()) throw std::invalid_argument("MonotoneCubic: slope size mismatch");
  }

  double front() const { return x_[0]; }
  double back() const { return x_[x_.size() - 1]; }
  bool covers(double t) const { return t >= front() && t <= back(); }
  Eigen::Index size() const { return x_.size(); }

  double operator()(double t) const {
    const Eigen::Index i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * slopes_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
           (s3 - s2) * h * slopes_[i + 1];
  }

  double derivative(double t) const {
    const Eigen::Index i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * y_[i] + (-6 * s2 + 6 * s) * y_[i + 1]) / h + (3 * s2 - 4 * s + 1) * slopes_[i] +
           (3 * s2 - 2 * s) * slopes_[i + 1];
  }

  static Eigen::ArrayXd pchip_slopes(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    const Eigen::Index n = x.size();
    Eigen::ArrayXd d = Eigen::ArrayXd::Zero(n);
    if (n == 2) {
      d.setConstant((y[1] - y[0]) / (x[1] - x[0]));
      return d;
    }
    Eigen::ArrayXd h = x.tail(n - 1) - x.head(n - 1);
    Eigen::ArrayXd delta = (y.tail(n - 1) - y.head(n - 1)) / h;
    for (Eigen::Index k = 1; k < n - 1; ++k) {
      if (delta[k - 1] * delta[k] <= 0.0) continue;
      const double w1 = 2 * h[k] + h[k - 1];
      const double w2 = h[k] + 2 * h[k - 1];
      d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
  }

 private:
  void check_nodes() const {
    if (x_.size() < 2 || y_.size() != x_.size()) throw std::invalid_argument("MonotoneCubic: need >= 2 nodes");
    for (Eigen::Index i = 1; i < x_.size(); ++i) {
      if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneCubic: nodes must be strictly increasing");
    }
  }

  Eigen::Index segment(double t) const {
    const auto* begin = x_.data();
    const auto* end = begin + x_.size();
    auto it = std::upper_bound(begin, end, t);
    Eigen::Index i = static_cast<Eigen::Index>(it - begin) - 1;
    return std::clamp<Eigen::Index>(i, 0, x_.size() - 2);
  }

  static double end_slope(double h0, double h1, double d0, double d1) {
    double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3 * d0)) return 3 * d0;
    return d;
  }

  Eigen::ArrayXd x_, y_, slopes_;
};

}  // namespace selfsim

#endif  // SELFSIM_INTERPOLATION_HPP
