#include "selfsim/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace selfsim {

void PropertyReport::record(double margin, const Witness& where) {
  ++checked;
  if (std::isnan(margin)) margin = -INFINITY;
  if (margin < worst_margin) {
    worst_margin = margin;
    witness = where;
  }
}

PropertyReport& PropertyReport::finish() {
  if (checked == 0) worst_margin = 0.0;
  passed = worst_margin >= 0.0;
  return *this;
}

SimilarityFrame similarity_frame(const PdeState& state, const ModelParams& params) {
  if (!(state.t > 0.0)) throw std::invalid_argument("similarity_frame: t must be > 0");
  const auto v = make_stationary<double>(params);
  const double log_sqrt_t = 0.5 * std::log(state.t);
  std::vector<double> z, f, xs, us;
  for (Eigen::Index i = 0; i < state.u.size(); ++i) {
    const double x = state.grid.x(i);
    const double u = state.u[i];
    if (x <= 0.0 || u < 1e-30) continue;
    z.push_back(std::log(x) - log_sqrt_t);
    f.push_back(u / v.value(x));
    xs.push_back(x);
    us.push_back(u);
  }
  SimilarityFrame frame;
  frame.t = state.t;
  const auto n = static_cast<Eigen::Index>(z.size());
  frame.zeta = Eigen::Map<Eigen::ArrayXd>(z.data(), n);
  frame.F = Eigen::Map<Eigen::ArrayXd>(f.data(), n);
  frame.x = Eigen::Map<Eigen::ArrayXd>(xs.data(), n);
  frame.u = Eigen::Map<Eigen::ArrayXd>(us.data(), n);
  return frame;
}

SimilarityFrame frame_from_profile(const ModelParams& params, const ProfileSolution& profile, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("frame_from_profile: t must be > 0");
  const auto v = make_stationary<double>(params);
  SimilarityFrame frame;
  frame.t = t;
  frame.zeta = profile.curve.zeta;
  frame.F = profile.curve.phi;
  frame.x = std::sqrt(t) * frame.zeta.exp();
  frame.u = frame.F * v.values(frame.x);
  return frame;
}

ProfileEvaluator::ProfileEvaluator(const ModelParams& params, const ProfileSolution& profile)
    : left_rate_(ProfileCoefficients<double>(params.p()).left_rate),
      amplitude_(profile.collocation_amplitude > 0.0 ? profile.collocation_amplitude
                                                     : profile.shooting_amplitude_A),
      zeta_(profile.curve.zeta),
      dphi_(profile.curve.dphi) {
  const ProfileCurve& c = profile.curve;
  if (!(c.phi > 0.0).all()) throw std::invalid_argument("ProfileEvaluator: phi must be positive on the grid");
  log_phi_ = MonotoneCubic(c.zeta, c.log_phi, c.dphi / c.phi);
}

double ProfileEvaluator::log_phi(double zeta) const {
  if (!covers(zeta)) throw std::domain_error("ProfileEvaluator: zeta outside the profile grid");
  return log_phi_(zeta);
}

double ProfileEvaluator::phi(double zeta) const { return std::exp(log_phi(zeta)); }

double ProfileEvaluator::dphi(double zeta) const {
  if (!covers(zeta)) throw std::domain_error("ProfileEvaluator: zeta outside the profile grid");
  const auto* begin = zeta_.data();
  const Eigen::Index n = zeta_.size();
  Eigen::Index i = static_cast<Eigen::Index>(std::upper_bound(begin, begin + n, zeta) - begin) - 1;
  i = std::clamp<Eigen::Index>(i, 0, n - 2);
  const double s = (zeta - zeta_[i]) / (zeta_[i + 1] - zeta_[i]);
  return (1.0 - s) * dphi_[i] + s * dphi_[i + 1];
}

double ProfileEvaluator::phi_extended(double zeta) const {
  if (zeta < front()) return std::max(0.0, 1.0 - amplitude_ * std::exp(left_rate_ * zeta));
  if (zeta > back()) return 0.0;
  return phi(zeta);
}

double profile_distance(const ModelParams& params, const SimilarityFrame& frame, const ProfileSolution& profile,
                        double window_lo, double window_hi) {
  if (!(window_hi > window_lo)) throw std::invalid_argument("profile_distance: empty window");
  if (frame.size() < 2 || frame.zeta[0] > window_lo || frame.zeta[frame.size() - 1] < window_hi) {
    throw std::invalid_argument("profile_distance: frame does not cover the window (empty overlap)");
  }
  const ProfileEvaluator phi(params, profile);
  if (!phi.covers(window_lo) || !phi.covers(window_hi)) {
    throw std::invalid_argument("profile_distance: profile grid does not cover the window");
  }
  const MonotoneCubic F(frame.zeta, frame.F);
  double worst = 0.0;
  auto probe = [&](double z) { worst = std::max(worst, std::abs(F(z) - phi.phi(z))); };
  probe(window_lo);
  probe(window_hi);
  for (Eigen::Index i = 0; i < frame.size(); ++i) {
    if (frame.zeta[i] > window_lo && frame.zeta[i] < window_hi) probe(frame.zeta[i]);
  }
  const Eigen::ArrayXd& pz = profile.curve.zeta;
  for (Eigen::Index i = 0; i < pz.size(); ++i) {
    if (pz[i] > window_lo && pz[i] < window_hi) probe(pz[i]);
  }
  return worst;
}

SandwichReport sandwich_check(const ModelParams& params, const SimilarityFrame& frame,
                              const ProfileSolution& profile, double b, double epsilon) {
  const double a = make_stationary<double>(params).offset_a;
  if (!(b >= a)) throw std::invalid_argument("sandwich_check: b must be >= the stationary offset a");
  if (!(frame.t > 0.0)) throw std::invalid_argument("sandwich_check: frame time must be > 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("sandwich_check: epsilon must be >= 0");
  const ProfileEvaluator phi(params, profile);
  SandwichReport r;
  r.b = b;
  r.lower.name = "sandwich.lower";
  r.upper.name = "sandwich.upper";
  const double sqrt_t = std::sqrt(frame.t);
  for (Eigen::Index i = 0; i < frame.size(); ++i) {
    const double z = frame.zeta[i], x = frame.x[i], F = frame.F[i];
    const double xi = std::log((x + b) / sqrt_t);
    r.upper.record(phi.phi_extended(z) + epsilon - F, {z, x, frame.t});
    r.lower.record(F - phi.phi_extended(xi) + epsilon, {z, x, frame.t});
  }
  r.lower.finish();
  r.upper.finish();
  return r;
}

Calibration calibrate_b(const ModelParams& params, std::span<const SimilarityFrame> frames,
                        const ProfileSolution& profile, double epsilon) {
  if (frames.empty()) throw std::invalid_argument("calibrate_b: no frames");
  Calibration c;
  c.offset_a = make_stationary<double>(params).offset_a;
  double worst_upper = INFINITY, worst_lower = INFINITY;
  for (int k = 0; k <= 20; ++k) {
    const double b = std::ldexp(c.offset_a, k);
    std::vector<SandwichReport> reports;
    bool ok = true;
    worst_upper = worst_lower = INFINITY;
    for (const SimilarityFrame& f : frames) {
      reports.push_back(sandwich_check(params, f, profile, b, epsilon));
      ok = ok && reports.back().passed();
      worst_upper = std::min(worst_upper, reports.back().upper.worst_margin);
      worst_lower = std::min(worst_lower, reports.back().lower.worst_margin);
    }
    if (ok) {
      c.b = b;
      c.doublings = k;
      c.reports = std::move(reports);
      return c;
    }
  }
  std::ostringstream msg;
  msg << "calibrate_b: no b in {a 2^k, k = 0..20} passes (at b = a 2^20: worst upper margin " << worst_upper
      << ", worst lower margin " << worst_lower << ")";
  throw SolverError(msg.str());
}

TheoreticalShift theoretical_b(const ModelParams& params, const ProfileSolution& profile) {
  const ProfileCurve& c = profile.curve;
  // Nodes where 1 - phi is below 1e-8 are replaced by the exact left-tail
  // limit 1/kappa: a profile read back from CSV cannot resolve them.
  double eps = 1.0 / ProfileCoefficients<double>(params.p()).left_rate;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c.dphi[i] < 0.0 && c.one_minus_phi[i] >= 1e-8) eps = std::min(eps, c.one_minus_phi[i] / -c.dphi[i]);
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw SolverError("theoretical_b: profile has no decreasing part");
  const double a = make_stationary<double>(params).offset_a;
  return {eps, std::max(a, a * (params.p() - 1.0) / (2.0 * eps))};
}

std::vector<SpaceTimePoint> comparison_samples(const ProfileSolution& profile, double b, std::size_t count,
                                               std::uint64_t seed, double t_lo, double t_hi) {
  if (!(t_hi > t_lo) || !(t_lo > 0.0)) throw std::invalid_argument("comparison_samples: need 0 < t_lo < t_hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_t(std::log(t_lo), std::log(t_hi));
  std::uniform_real_distribution<double> zeta(profile.zeta_min(), profile.zeta_max());
  std::vector<SpaceTimePoint> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw std::runtime_error("comparison_samples: too many rejections");
    const double t = std::exp(log_t(rng));
    const double x = std::sqrt(t) * std::exp(zeta(rng));
    if (!(x > 0.0) || std::log((x + b) / std::sqrt(t)) > profile.zeta_max()) continue;
    out.push_back({x, t});
  }
  return out;
}

double comparison_bracket(const ModelParams& params, const ProfileEvaluator& profile, double shift, double x,
                          double t) {
  if (!(x > 0.0) || !(t > 0.0)) throw std::invalid_argument("comparison_bracket: need x > 0 and t > 0");
  const ProfileCoefficients<double> k(params.p());
  const double q = params.p() - 1.0;
  const double a = make_stationary<double>(params).offset_a;
  const double z = std::log((x + shift) / std::sqrt(t));
  if (!profile.covers(z)) throw std::domain_error("comparison_bracket: sample outside the profile coverage");
  const double lphi = profile.log_phi(z);
  const double phi = std::exp(lphi);
  const double deficit = -std::expm1(q * lphi);  // 1 - phi^{p-1}
  const double r = (x + shift) / (x + a);
  return 4.0 / q * (1.0 - r) * (-profile.dphi(z)) + k.reaction * (1.0 - r * r) * phi * deficit;
}

ComparisonReports comparison_residuals(const ModelParams& params, const ProfileSolution& profile, double b,
                                       std::span<const SpaceTimePoint> samples) {
  const double a = make_stationary<double>(params).offset_a;
  if (!(b >= a)) throw std::invalid_argument("comparison_residuals: b must be >= the stationary offset a");
  const ProfileEvaluator phi(params, profile);
  ComparisonReports r;
  r.sub.name = "comparison.sub";
  r.super.name = "comparison.super";
  for (const SpaceTimePoint& s : samples) {
    const double sub = comparison_bracket(params, phi, b, s.x, s.t);
    const double sup = comparison_bracket(params, phi, 0.0, s.x, s.t);
    r.sub.record(-sub, {std::log((s.x + b) / std::sqrt(s.t)), s.x, s.t});
    r.super.record(sup, {std::log(s.x / std::sqrt(s.t)), s.x, s.t});
  }
  r.sub.finish();
  r.super.finish();
  return r;
}

}  // namespace selfsim
