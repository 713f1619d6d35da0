#include "selfsim/harness.hpp"

#include <algorithm>
#include <cmath>

namespace selfsim {

namespace {

PropertyReport single(std::string name, double margin, const Witness& where = {},
                      std::optional<std::uint64_t> seed = std::nullopt) {
  PropertyReport r;
  r.name = std::move(name);
  r.seed = seed;
  r.record(margin, where);
  return r.finish();
}

Eigen::Index node_at(const Eigen::ArrayXd& zeta, double z) {
  const double h = zeta[1] - zeta[0];
  const auto i = static_cast<Eigen::Index>(std::llround((z - zeta[0]) / h));
  if (i < 0 || i >= zeta.size() || std::abs(zeta[i] - z) > 1e-9) {
    throw std::invalid_argument("harness: zeta = " + std::to_string(z) + " is not a grid node");
  }
  return i;
}

}  // namespace

double measured_left_slope(const ProfileSolution& profile, double zeta) {
  const ProfileCurve& c = profile.curve;
  const Eigen::Index i = node_at(c.zeta, zeta);
  if (i == 0 || i == c.size() - 1) throw std::invalid_argument("measured_left_slope: need an interior node");
  return (std::log(c.one_minus_phi[i + 1]) - std::log(c.one_minus_phi[i - 1])) / (c.zeta[i + 1] - c.zeta[i - 1]);
}

double measured_right_slope(const ProfileSolution& profile, double zeta_lo, double zeta_hi) {
  const ProfileCurve& c = profile.curve;
  const Eigen::Index i = node_at(c.zeta, zeta_lo), j = node_at(c.zeta, zeta_hi);
  auto g = [&](Eigen::Index k) { return c.log_phi[k] + 0.25 * std::exp(2.0 * c.zeta[k]); };
  return (g(j) - g(i)) / (c.zeta[j] - c.zeta[i]);
}

double collocation_oracle_distance(const ModelParams& params, const ProfileSolution& profile,
                                   const ProfileTolerances& tol) {
  const Eigen::ArrayXd zeta = uniform_grid(tol.zeta_min, tol.zeta_max, tol.grid_h);
  const ProfileSolution oracle = collocate_profile(params, tol, tanh_initial_guess(params, zeta));
  if (oracle.curve.size() != profile.curve.size()) throw std::invalid_argument("oracle: grid mismatch");
  return (oracle.curve.phi - profile.curve.phi).abs().maxCoeff();
}

std::vector<PropertyReport> profile_properties(const ModelParams& params, const ProfileSolution& profile,
                                               const ProfileTolerances& tol, const HarnessConfig& cfg) {
  const ProfileCurve& c = profile.curve;
  const Eigen::Index n = c.size();
  const ProfileCoefficients<double> k(params.p());
  std::vector<PropertyReport> out;

  out.push_back(single("profile.residual", tol.residual - profile.max_residual));

  PropertyReport mono;
  mono.name = "profile.monotone";
  for (Eigen::Index i = 1; i < n - 1; ++i) {
    // scale-free: ln phi strictly decreasing and phi'/phi < 0
    mono.record(std::min(c.log_phi[i - 1] - c.log_phi[i], -c.dphi[i] / c.phi[i]), {c.zeta[i], {}, {}});
  }
  out.push_back(mono.finish());

  PropertyReport bounds;
  bounds.name = "profile.bounds";
  for (Eigen::Index i = 1; i < n - 1; ++i) {
    bounds.record(std::min(c.phi[i], c.one_minus_phi[i]), {c.zeta[i], {}, {}});
  }
  out.push_back(bounds.finish());

  PropertyReport tails;
  tails.name = "profile.tails";
  tails.record(tol.tail_tol - c.one_minus_phi[0], {c.zeta[0], {}, {}});
  tails.record(tol.tail_tol - c.phi[n - 1], {c.zeta[n - 1], {}, {}});
  out.push_back(tails.finish());

  const double zl = std::max(-6.0, profile.zeta_min() + 1.0);
  const double left = measured_left_slope(profile, zl);
  out.push_back(single("profile.left_slope", cfg.slope_tolerance - std::abs(left / k.left_rate - 1.0), {zl, {}, {}}));

  const double zr_lo = std::max(2.0, profile.zeta_max() - 1.0), zr_hi = profile.zeta_max();
  const double right = measured_right_slope(profile, zr_lo, zr_hi);
  out.push_back(
      single("profile.right_slope", cfg.slope_tolerance - std::abs(right / k.right_power - 1.0), {zr_lo, {}, {}}));
  return out;
}

std::vector<PropertyReport> comparison_properties(const ModelParams& params, const ProfileSolution& profile,
                                                  const HarnessConfig& cfg) {
  const double a = make_stationary<double>(params).offset_a;
  const double b = cfg.sub_solution_factor * a;
  const std::uint64_t seed = cfg.seed + 101;
  const auto samples = comparison_samples(profile, b, cfg.comparison_samples, seed);
  ComparisonReports r = comparison_residuals(params, profile, b, samples);
  r.sub.seed = seed;
  r.super.seed = seed;

  const ProfileEvaluator phi(params, profile);
  PropertyReport zero;
  zero.name = "comparison.sub_at_offset";
  zero.seed = seed;
  for (const SpaceTimePoint& s : samples) {
    if (std::log((s.x + a) / std::sqrt(s.t)) > profile.zeta_max()) continue;
    const double bracket = comparison_bracket(params, phi, a, s.x, s.t);
    zero.record(cfg.bracket_zero_tolerance - std::abs(bracket), {std::log((s.x + a) / std::sqrt(s.t)), s.x, s.t});
  }
  return {r.super, r.sub, zero.finish()};
}

std::vector<PropertyReport> poincare_properties(const ModelParams& params, const HarnessConfig& cfg) {
  const PoincareThresholds th = poincare_thresholds(params);
  std::vector<PropertyReport> out;
  for (Side side : {Side::right, Side::left}) {
    const double R = side == Side::right ? th.R0 : th.R0_prime;
    const std::uint64_t seed = cfg.seed + (side == Side::right ? 201 : 202);
    std::mt19937_64 rng(seed);
    PropertyReport interval, boundary;
    for (int k = 0; k < cfg.poincare_functions; ++k) {
      const TestFunction w = TestFunction::sample(random_bumps(rng, R, side), R, side);
      const PoincareReports r = poincare_check(params, w, R, side);
      if (k == 0) {
        interval.name = r.interval.name;
        boundary.name = r.boundary.name;
      }
      interval.record(r.interval.worst_margin, r.interval.witness);
      boundary.record(r.boundary.worst_margin, r.boundary.witness);
    }
    interval.seed = boundary.seed = seed;
    out.push_back(interval.finish());
    out.push_back(boundary.finish());
  }
  return out;
}

ProfileCurve random_admissible_perturbation(const ProfileCurve& base, std::mt19937_64& rng, double amplitude) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> centre(0.0, 2.5), width(0.3, 1.5), weight(-1.0, 1.0);
  BumpSum bumps;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    const double c = centre(rng);
    const double w = width(rng);
    bumps.bumps.push_back({c, w, weight(rng)});
  }
  double peak = 0.0;
  for (Eigen::Index i = 0; i < base.size(); ++i) peak = std::max(peak, std::abs(bumps.value(base.zeta[i])));
  if (peak == 0.0) return base;
  return perturb_profile(base, bumps, amplitude / peak);
}

std::array<double, 3> geodesic_second_differences(const ModelParams& params, const ProfileCurve& phi1,
                                                  const ProfileCurve& phi2) {
  std::array<double, 5> e{};
  for (int j = 0; j <= 4; ++j) e[j] = energy(params, geodesic_path(phi1, phi2, 0.25 * j)).value;
  return {e[0] - 2 * e[1] + e[2], e[1] - 2 * e[2] + e[3], e[2] - 2 * e[3] + e[4]};
}

std::vector<PropertyReport> energy_properties(const ModelParams& params, const ProfileSolution& profile,
                                              const HarnessConfig& cfg) {
  const ProfileCurve& base = profile.curve;
  std::vector<PropertyReport> out;
  const CutoffEta eta;

  PropertyReport left;
  left.name = "energy.left_integrand_nonnegative";
  auto scan_left = [&](const ProfileCurve& c) {
    const Eigen::ArrayXd f = energy_density(params, c, eta);
    for (Eigen::Index i = 0; i < c.size() && c.zeta[i] <= 0.0; ++i) left.record(f[i], {c.zeta[i], {}, {}});
  };
  scan_left(base);

  const std::uint64_t conv_seed = cfg.seed + 301;
  std::mt19937_64 conv_rng(conv_seed);
  PropertyReport convex;
  convex.name = "energy.geodesic_convexity";
  convex.seed = conv_seed;
  for (int k = 0; k < cfg.convexity_pairs; ++k) {
    const ProfileCurve other = random_admissible_perturbation(base, conv_rng, 0.5);
    scan_left(other);
    const auto d2 = geodesic_second_differences(params, base, other);
    for (int j = 0; j < 3; ++j) convex.record(d2[j], {{}, {}, 0.25 * (j + 1)});
  }
  out.push_back(left.finish());
  out.push_back(convex.finish());

  const std::uint64_t min_seed = cfg.seed + 302;
  std::mt19937_64 min_rng(min_seed);
  PropertyReport minimal;
  minimal.name = "energy.minimality";
  minimal.seed = min_seed;
  const double e0 = energy(params, base).value;
  for (int k = 0; k < cfg.minimality_bumps; ++k) {
    const ProfileCurve other = random_admissible_perturbation(base, min_rng, 0.1);
    minimal.record(energy(params, other).value - e0, {});
  }
  out.push_back(minimal.finish());
  return out;
}

std::vector<PropertyReport> snapshot_properties(const ModelParams& params, std::span<const PdeState> snapshots,
                                                std::span<const BalanceInterval> balance,
                                                const HarnessConfig& cfg) {
  std::vector<PropertyReport> out;
  if (snapshots.empty()) return out;
  const auto v = make_stationary<double>(params);
  PropertyReport positive, barrier, far, monotone;
  positive.name = "pde.positivity";
  barrier.name = "pde.sub_stationary";
  far.name = "pde.far_field";
  monotone.name = "pde.monotone_in_time";
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    const PdeState& st = snapshots[s];
    const Eigen::Index n = st.u.size();
    const double peak = st.u.maxCoeff();
    const Eigen::Index tail_start = n - n / 10;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = st.grid.x(i);
      const Witness w{{}, x, st.t};
      positive.record(st.u[i], w);
      barrier.record(v.value(x) + cfg.epsilon_scheme - st.u[i], w);
      if (i >= tail_start) far.record(1e-8 * peak - st.u[i], w);
      if (s > 0) monotone.record(st.u[i] - snapshots[s - 1].u[i], w);
    }
  }
  out.push_back(positive.finish());
  out.push_back(monotone.finish());
  out.push_back(barrier.finish());
  out.push_back(far.finish());
  if (!balance.empty()) {
    PropertyReport flux;
    flux.name = "pde.flux_balance";
    const double tol = 1e-3 * std::max(params.source_flux(), 1e-300);
    for (const BalanceInterval& b : balance) flux.record(tol - std::abs(b.defect), {{}, {}, b.t1});
    out.push_back(flux.finish());
  }
  return out;
}

FrameAnalysis analyze_frames(const ModelParams& params, const ProfileSolution& profile,
                             std::span<const PdeState> snapshots, const HarnessConfig& cfg) {
  FrameAnalysis a;
  for (const PdeState& s : snapshots) {
    a.frames.push_back(similarity_frame(s, params));
    a.distances.push_back(profile_distance(params, a.frames.back(), profile, cfg.window_lo, cfg.window_hi));
  }
  if (!a.frames.empty()) {
    try {
      a.calibration = calibrate_b(params, a.frames, profile, cfg.epsilon_scheme);
    } catch (const SolverError& e) {
      a.calibration_error = e.what();
    }
  }
  return a;
}

std::vector<PropertyReport> frame_properties(const ModelParams& params, const ProfileSolution& profile,
                                             const FrameAnalysis& analysis, const HarnessConfig& cfg) {
  std::vector<PropertyReport> out;
  if (analysis.frames.empty()) return out;
  PropertyReport bound, mono;
  bound.name = "frame.upper_bound";
  mono.name = "frame.monotone";
  for (const SimilarityFrame& f : analysis.frames) {
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      bound.record(1.0 + cfg.epsilon_scheme - f.F[i], {f.zeta[i], f.x[i], f.t});
      if (i + 1 < f.size()) mono.record(f.F[i] - f.F[i + 1] + cfg.epsilon_scheme, {f.zeta[i], f.x[i], f.t});
    }
  }
  out.push_back(bound.finish());
  out.push_back(mono.finish());

  PropertyReport lower, upper;
  lower.name = "sandwich.lower";
  upper.name = "sandwich.upper";
  if (analysis.calibration) {
    for (const SandwichReport& r : analysis.calibration->reports) {
      lower.record(r.lower.worst_margin, r.lower.witness);
      upper.record(r.upper.worst_margin, r.upper.witness);
    }
  } else {
    // report the failure at the largest b tried
    const double b = std::ldexp(make_stationary<double>(params).offset_a, 20);
    for (const SimilarityFrame& f : analysis.frames) {
      const SandwichReport r = sandwich_check(params, f, profile, b, cfg.epsilon_scheme);
      lower.record(r.lower.worst_margin, r.lower.witness);
      upper.record(r.upper.worst_margin, r.upper.witness);
    }
  }
  out.push_back(lower.finish());
  out.push_back(upper.finish());

  PropertyReport decreasing;
  decreasing.name = "distance.non_increasing";
  for (std::size_t k = 1; k < analysis.distances.size(); ++k) {
    decreasing.record(analysis.distances[k - 1] - analysis.distances[k], {{}, {}, analysis.frames[k].t});
  }
  out.push_back(decreasing.finish());
  return out;
}

}  // namespace selfsim
