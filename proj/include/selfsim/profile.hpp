// Self-similar profile of the infinite-source problem: u = v_inf(x) phi(z),
// z = ln(x / sqrt(t)), where phi solves
//   phi'' + (e^{2z}/2 - (p+3)/(p-1)) phi' + 2(p+1)/(p-1)^2 phi (1 - phi^{p-1}) = 0
// with phi -> 1 as z -> -inf and phi -> 0 as z -> +inf.
#ifndef SELFSIM_PROFILE_HPP
#define SELFSIM_PROFILE_HPP

#include "selfsim/model.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace selfsim {

/// Numerical failure inside a solver (as opposed to a caller error).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A candidate profile sampled on a grid. Besides phi itself the curve keeps
/// 1 - phi and ln phi, which carry the tails to full relative precision where
/// phi is within rounding of 1 or underflows toward 0.
struct ProfileCurve {
  Eigen::ArrayXd zeta;
  Eigen::ArrayXd phi;
  Eigen::ArrayXd dphi;
  Eigen::ArrayXd one_minus_phi;
  Eigen::ArrayXd log_phi;

  Eigen::Index size() const { return zeta.size(); }

  /// Builds the auxiliary columns from phi alone (precision limited by phi).
  static ProfileCurve from_phi(Eigen::ArrayXd zeta, Eigen::ArrayXd phi, Eigen::ArrayXd dphi);

  /// Builds all columns from y = -ln phi and its derivative.
  static ProfileCurve from_neg_log(Eigen::ArrayXd zeta, const Eigen::ArrayXd& y, const Eigen::ArrayXd& dy);

  void check_consistent() const;
};

struct ProfileTolerances {
  double zeta_min = -12.0;
  double zeta_max = 3.0;
  double grid_h = 1.0 / 256.0;
  double residual = 1e-8;
  double amplitude_rel = 1e-10;
  double tail_tol = 1e-10;
  double shoot_rtol = 1e-12;
  int newton_max_iterations = 100;
};

struct ProfileSolution {
  ProfileCurve curve;
  double shooting_amplitude_A = 0.0;
  /// Left amplitude implied by the collocation grid, (1 - phi(z_-)) e^{-kappa z_-}.
  double collocation_amplitude = 0.0;
  double max_residual = 0.0;
  double grid_h = 0.0;
  int newton_iterations = 0;

  double zeta_min() const { return curve.zeta[0]; }
  double zeta_max() const { return curve.zeta[curve.size() - 1]; }
};

/// phi'' + (e^{2z}/2 - c) phi' + k phi (1 - phi^{p-1}). Rejects phi < 0.
double ode_residual(const ModelParams& params, double zeta, double phi, double dphi, double d2phi);

struct LeftAsymptote {
  double phi;
  double dphi;
  double one_minus_phi;
};

struct RightAsymptote {
  double phi;
  double dphi;
  double log_phi;
};

/// 1 - phi = A e^{kappa z}, kappa = 2(p+1)/(p-1).
LeftAsymptote left_asymptote(const ModelParams& params, double amplitude, double zeta);

/// phi = C exp(-e^{2z}/4 + (5-p)/(p-1) z).
RightAsymptote right_asymptote(const ModelParams& params, double amplitude, double zeta);

enum class ShotOutcome { overshoot, undershoot, within_tolerance };

std::string to_string(ShotOutcome outcome);

struct ShootingControls {
  double rtol = 1e-12;
  double tail_tol = 1e-10;
  double min_step = 1e-14;
  double max_step = 0.25;
};

struct ShotResult {
  ShotOutcome outcome;
  /// Accepted integrator nodes; phi/dphi/one_minus_phi populated.
  std::vector<double> zeta, phi, dphi, one_minus_phi;
  double end_zeta = 0.0;
};

/// Integrates the profile equation forward from the left asymptote with
/// amplitude A and classifies the trajectory.
ShotResult shoot(const ModelParams& params, double amplitude, double zeta_minus, double zeta_plus,
                 const ShootingControls& controls = {});

struct BisectionRecord {
  double amplitude;
  ShotOutcome outcome;
};

struct AmplitudeBracket {
  double undershoot;  // lower end, log-space
  double overshoot;   // upper end
  double amplitude;   // accepted value
  std::vector<BisectionRecord> log;
};

/// Bisects ln A between an undershoot and an overshoot witness. The search
/// starts from `seed` and expands by decades within [1e-12, 1e12].
AmplitudeBracket bisect_amplitude(const ModelParams& params, const ProfileTolerances& tol, double seed = 1.0);

/// y = -ln phi guess shaped like (1 - tanh z)/2 with the right Gaussian envelope.
Eigen::ArrayXd tanh_initial_guess(const ModelParams& params, const Eigen::ArrayXd& zeta);

Eigen::ArrayXd uniform_grid(double lo, double hi, double h);

/// Damped Newton on second-order central differences for y = -ln phi on a
/// uniform grid. Boundary rows impose the log-derivatives of the left and
/// right asymptotic forms through ghost nodes.
ProfileSolution collocate_profile(const ModelParams& params, const ProfileTolerances& tol,
                                  const Eigen::ArrayXd& initial_neg_log);

/// Shooting bisection followed by collocation refinement of the trajectory.
ProfileSolution solve_profile(const ModelParams& params, const ProfileTolerances& tol = {});

/// Quintic smoothstep cutoff: 1 for z <= 0, 0 for z >= 1, C^2 in between.
struct CutoffEta {
  double value(double zeta) const;
  double derivative(double zeta) const;
  double second_derivative(double zeta) const;
};

struct EnergyResult {
  double value = 0.0;  // quadrature + tails
  double quadrature = 0.0;
  double quadrature_error = 0.0;
  double left_tail = 0.0;
  double right_tail = 0.0;
  bool tails_certified = false;
};

/// rho * { (phi')^2/2 + eta/(p-1) - phi^2 (p+1-2 phi^{p-1})/(p-1)^2 } at each node.
Eigen::ArrayXd energy_density(const ModelParams& params, const ProfileCurve& curve, const CutoffEta& eta = {});

/// Trapezoid quadrature of the energy density on a uniform grid with an even
/// number of intervals, plus exponential tail bounds at both ends.
EnergyResult energy(const ModelParams& params, const ProfileCurve& curve, const CutoffEta& eta = {});

/// Pointwise sqrt(t phi2^2 + (1-t) phi1^2), with derivative and tail columns.
ProfileCurve geodesic_path(const ProfileCurve& phi1, const ProfileCurve& phi2, double t);

/// Candidate built from the cutoff itself, phi = eta.
ProfileCurve eta_candidate(const Eigen::ArrayXd& zeta, const CutoffEta& eta = {});

/// A compactly supported bump sum b(z) and its derivative.
struct BumpSum {
  struct Bump {
    double center;
    double width;
    double weight;
  };
  std::vector<Bump> bumps;

  double value(double zeta) const;
  double derivative(double zeta) const;
};

/// phi + eps b phi (1 - phi): stays inside (0,1) whenever |eps b| < 1.
ProfileCurve perturb_profile(const ProfileCurve& base, const BumpSum& bumps, double scale);

}  // namespace selfsim

#endif  // SELFSIM_PROFILE_HPP
