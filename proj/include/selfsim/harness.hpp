// Property harness: every invariant and inequality of the model as a list of
// PropertyReports.
#ifndef SELFSIM_HARNESS_HPP
#define SELFSIM_HARNESS_HPP

#include "selfsim/pde.hpp"
#include "selfsim/poincare.hpp"
#include "selfsim/profile.hpp"
#include "selfsim/similarity.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace selfsim {

struct HarnessConfig {
  double epsilon_scheme = 1e-3;
  std::uint64_t seed = 42;
  double window_lo = -2.0;
  double window_hi = 2.0;
  std::size_t comparison_samples = 10000;
  double sub_solution_factor = 2.0;  // b = factor * a in the sub-solution sign check
  int poincare_functions = 100;
  int convexity_pairs = 10;
  int minimality_bumps = 20;
  double slope_tolerance = 0.02;
  double bracket_zero_tolerance = 1e-12;
};

/// Residual, strict monotonicity, bounds, tail values and asymptotic slopes.
std::vector<PropertyReport> profile_properties(const ModelParams& params, const ProfileSolution& profile,
                                               const ProfileTolerances& tol, const HarnessConfig& cfg = {});

/// d ln(1 - phi)/dz at z, by central differences on the grid.
double measured_left_slope(const ProfileSolution& profile, double zeta);

/// Secant slope of ln phi + e^{2z}/4 between z_lo and z_hi (grid nodes).
double measured_right_slope(const ProfileSolution& profile, double zeta_lo, double zeta_hi);

/// Sup distance between the solution and a collocation solve started from the
/// tanh-shaped guess on the same grid.
double collocation_oracle_distance(const ModelParams& params, const ProfileSolution& profile,
                                   const ProfileTolerances& tol);

/// Signs of the sub- and super-solution brackets and the b = a cancellation.
std::vector<PropertyReport> comparison_properties(const ModelParams& params, const ProfileSolution& profile,
                                                  const HarnessConfig& cfg = {});

/// All four inequalities at R0 and R0' for cfg.poincare_functions test functions each.
std::vector<PropertyReport> poincare_properties(const ModelParams& params, const HarnessConfig& cfg = {});

/// Random admissible perturbation phi + eps b phi(1 - phi) with |eps b| <= amplitude.
ProfileCurve random_admissible_perturbation(const ProfileCurve& base, std::mt19937_64& rng, double amplitude);

/// Second differences of E along the geodesic path at t = 0.25, 0.5, 0.75.
std::array<double, 3> geodesic_second_differences(const ModelParams& params, const ProfileCurve& phi1,
                                                  const ProfileCurve& phi2);

/// Non-negative integrand on z <= 0, convexity along geodesic paths and
/// minimality against bump perturbations.
std::vector<PropertyReport> energy_properties(const ModelParams& params, const ProfileSolution& profile,
                                              const HarnessConfig& cfg = {});

/// Positivity, temporal monotonicity, sub-stationarity, far-field hygiene and
/// (when supplied) the flux balance of consecutive snapshots.
std::vector<PropertyReport> snapshot_properties(const ModelParams& params, std::span<const PdeState> snapshots,
                                                std::span<const BalanceInterval> balance,
                                                const HarnessConfig& cfg = {});

struct FrameAnalysis {
  std::vector<SimilarityFrame> frames;
  std::vector<double> distances;
  std::optional<Calibration> calibration;
  std::string calibration_error;
};

FrameAnalysis analyze_frames(const ModelParams& params, const ProfileSolution& profile,
                             std::span<const PdeState> snapshots, const HarnessConfig& cfg = {});

/// F bounds and monotonicity, sandwich with the calibrated b, and the
/// non-increasing distance sequence.
std::vector<PropertyReport> frame_properties(const ModelParams& params, const ProfileSolution& profile,
                                             const FrameAnalysis& analysis, const HarnessConfig& cfg = {});

}  // namespace selfsim

#endif  // SELFSIM_HARNESS_HPP
