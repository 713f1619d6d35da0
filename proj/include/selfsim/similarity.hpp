// PDE snapshots in similarity variables: F(z,t) = u(x,t) / v(x) with
// z = ln(x / sqrt t), collapse onto the profile, sandwich bounds and the
// signs of the comparison residuals.
#ifndef SELFSIM_SIMILARITY_HPP
#define SELFSIM_SIMILARITY_HPP

#include "selfsim/interpolation.hpp"
#include "selfsim/model.hpp"
#include "selfsim/pde.hpp"
#include "selfsim/profile.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace selfsim {

struct Witness {
  std::optional<double> zeta;
  std::optional<double> x;
  std::optional<double> t;
};

/// Outcome of one inequality or invariant check. Margins are oriented so
/// that worst_margin >= 0 means the property holds.
struct PropertyReport {
  std::string name;
  bool passed = true;
  double worst_margin = INFINITY;
  Witness witness;
  std::optional<std::uint64_t> seed;
  std::size_t checked = 0;

  /// Folds one sample into the report; the witness follows the worst margin.
  void record(double margin, const Witness& where);
  /// passed <=> worst_margin >= 0; an empty report passes with margin 0.
  PropertyReport& finish();
};

struct SimilarityFrame {
  double t = 0.0;
  Eigen::ArrayXd zeta;
  Eigen::ArrayXd F;
  Eigen::ArrayXd x;  // source node of each sample
  Eigen::ArrayXd u;

  Eigen::Index size() const { return zeta.size(); }
};

/// F = u / v_alpha at every node with x > 0 and u >= 1e-30.
SimilarityFrame similarity_frame(const PdeState& state, const ModelParams& params);

/// Frame sampled from the profile itself at times t (F(z) = phi(z) on the
/// profile grid); used as a self-consistency oracle.
SimilarityFrame frame_from_profile(const ModelParams& params, const ProfileSolution& profile, double t);

/// Evaluates phi, ln phi and phi' anywhere. Inside the grid ln phi is a
/// cubic Hermite interpolant with the exact log-derivative as slopes, so phi
/// stays positive in the far tail; phi' interpolates linearly. Outside the
/// grid `phi_extended` follows the left asymptote or returns 0.
class ProfileEvaluator {
 public:
  ProfileEvaluator(const ModelParams& params, const ProfileSolution& profile);

  bool covers(double zeta) const { return log_phi_.covers(zeta); }
  double front() const { return log_phi_.front(); }
  double back() const { return log_phi_.back(); }

  double phi(double zeta) const;
  double log_phi(double zeta) const;
  double dphi(double zeta) const;
  double phi_extended(double zeta) const;

 private:
  double left_rate_;
  double amplitude_;
  MonotoneCubic log_phi_;
  Eigen::ArrayXd zeta_, dphi_;
};

/// sup over the window of |F - phi|, evaluated at every frame and profile
/// node inside the window (F by monotone cubic interpolation).
double profile_distance(const ModelParams& params, const SimilarityFrame& frame, const ProfileSolution& profile,
                        double window_lo, double window_hi);

struct SandwichReport {
  PropertyReport lower;  // F - phi(xi) + eps >= 0
  PropertyReport upper;  // phi(z) + eps - F >= 0
  double b = 0.0;
  bool passed() const { return lower.passed && upper.passed; }
};

/// phi(xi) - eps <= F <= phi(z) + eps at every frame node, xi = ln(e^z + b/sqrt t).
SandwichReport sandwich_check(const ModelParams& params, const SimilarityFrame& frame,
                              const ProfileSolution& profile, double b, double epsilon);

struct Calibration {
  double b = 0.0;
  double offset_a = 0.0;
  int doublings = 0;  // b = a 2^doublings
  std::vector<SandwichReport> reports;
};

/// Smallest b in {a 2^k : k = 0..20} for which every frame passes the
/// sandwich check. Throws SolverError when none does.
Calibration calibrate_b(const ModelParams& params, std::span<const SimilarityFrame> frames,
                        const ProfileSolution& profile, double epsilon);

struct TheoreticalShift {
  double epsilon;  // largest eps with 1 - phi + eps phi' >= 0 on the grid
  double b;        // max(a, a (p-1) / (2 eps))
};

/// The shift b from the sub-solution flux condition, with eps estimated as
/// min (1 - phi)/(-phi') over the profile grid.
TheoreticalShift theoretical_b(const ModelParams& params, const ProfileSolution& profile);

struct SpaceTimePoint {
  double x;
  double t;
};

/// Seeded (x, t) samples with t log-uniform in [t_lo, t_hi] and z = ln(x/sqrt t)
/// uniform over the profile grid, redrawn until ln((x+b)/sqrt t) is covered too.
std::vector<SpaceTimePoint> comparison_samples(const ProfileSolution& profile, double b, std::size_t count,
                                               std::uint64_t seed, double t_lo = 1e-2, double t_hi = 1e2);

/// Parabolic residual P[u] = u_t - u_xx + u^p of u = v(x) phi(ln((x+s)/sqrt t)),
/// divided by v(x) / (x+s)^2, expressed through the profile equation as
///   (4/(p-1)) (1 - r)(-phi') + k (1 - r^2) phi (1 - phi^{p-1}),  r = (x+s)/(x+a).
double comparison_bracket(const ModelParams& params, const ProfileEvaluator& profile, double shift, double x,
                          double t);

struct ComparisonReports {
  PropertyReport sub;    // margin = -bracket with shift b
  PropertyReport super;  // margin = bracket with shift 0
};

ComparisonReports comparison_residuals(const ModelParams& params, const ProfileSolution& profile, double b,
                                       std::span<const SpaceTimePoint> samples);

}  // namespace selfsim

#endif  // SELFSIM_SIMILARITY_HPP
