#include "selfsim/profile.hpp"

#include "selfsim/integrator.hpp"
#include "selfsim/interpolation.hpp"
#include "selfsim/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace selfsim {

ProfileCurve ProfileCurve::from_phi(Eigen::ArrayXd zeta, Eigen::ArrayXd phi, Eigen::ArrayXd dphi) {
  ProfileCurve c;
  c.one_minus_phi = 1.0 - phi;
  c.log_phi = phi.unaryExpr([](double v) { return v > 0.0 ? std::log(v) : -INFINITY; });
  c.zeta = std::move(zeta);
  c.phi = std::move(phi);
  c.dphi = std::move(dphi);
  c.check_consistent();
  return c;
}

ProfileCurve ProfileCurve::from_neg_log(Eigen::ArrayXd zeta, const Eigen::ArrayXd& y, const Eigen::ArrayXd& dy) {
  ProfileCurve c;
  c.zeta = std::move(zeta);
  c.phi = (-y).exp();
  c.dphi = -dy * c.phi;
  c.one_minus_phi = y.unaryExpr([](double v) { return -std::expm1(-v); });
  c.log_phi = -y;
  c.check_consistent();
  return c;
}

void ProfileCurve::check_consistent() const {
  const Eigen::Index n = zeta.size();
  if (phi.size() != n || dphi.size() != n || one_minus_phi.size() != n || log_phi.size() != n) {
    throw std::invalid_argument("ProfileCurve: column sizes differ");
  }
  if (n < 2) throw std::invalid_argument("ProfileCurve: need at least two nodes");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(zeta[i] > zeta[i - 1])) throw std::invalid_argument("ProfileCurve: zeta grid must be increasing");
  }
}

double ode_residual(const ModelParams& params, double zeta, double phi, double dphi, double d2phi) {
  const ProfileCoefficients<double> k(params.p());
  const double source = k.reaction * phi * (1.0 - positive_pow(phi, params.p() - 1.0));
  return d2phi + (0.5 * std::exp(2.0 * zeta) - k.drift) * dphi + source;
}

LeftAsymptote left_asymptote(const ModelParams& params, double amplitude, double zeta) {
  if (amplitude < 0.0) throw std::invalid_argument("left_asymptote: amplitude must be >= 0");
  const ProfileCoefficients<double> k(params.p());
  const double dev = amplitude * std::exp(k.left_rate * zeta);
  if (!(dev < 1.0)) throw std::domain_error("left_asymptote: seed point is not in the asymptotic regime (A e^{kz} >= 1)");
  return {1.0 - dev, -k.left_rate * dev, dev};
}

RightAsymptote right_asymptote(const ModelParams& params, double amplitude, double zeta) {
  if (amplitude < 0.0) throw std::invalid_argument("right_asymptote: amplitude must be >= 0");
  const ProfileCoefficients<double> k(params.p());
  const double e2 = std::exp(2.0 * zeta);
  if (amplitude == 0.0) return {0.0, 0.0, -INFINITY};
  const double log_phi = std::log(amplitude) - 0.25 * e2 + k.right_power * zeta;
  const double phi = std::exp(log_phi);
  if (!(phi < 1.0)) throw std::domain_error("right_asymptote: returned phi >= 1, zeta is not in the tail");
  return {phi, phi * (k.right_power - 0.5 * e2), log_phi};
}

std::string to_string(ShotOutcome outcome) {
  switch (outcome) {
    case ShotOutcome::overshoot:
      return "overshoot";
    case ShotOutcome::undershoot:
      return "undershoot";
    case ShotOutcome::within_tolerance:
      return "within_tolerance";
  }
  return "unknown";
}

namespace {

// Switch from the 1-phi state to the phi state once the trajectory is half way.
constexpr double kPhaseSwitch = 0.5;

}  // namespace

ShotResult shoot(const ModelParams& params, double amplitude, double zeta_minus, double zeta_plus,
                 const ShootingControls& controls) {
  if (!(zeta_minus <= -6.0) || !(zeta_plus >= 2.0)) {
    throw std::invalid_argument("shoot: requires zeta_minus <= -6 and zeta_plus >= 2");
  }
  if (!(amplitude > 0.0)) throw std::invalid_argument("shoot: amplitude must be > 0");
  const ProfileCoefficients<double> k(params.p());
  const double q = params.p() - 1.0;
  const LeftAsymptote seed = left_asymptote(params, amplitude, zeta_minus);

  using Integrator = DormandPrince<2>;
  using State = Integrator::State;

  // (1-phi, (1-phi)')
  auto complement_rhs = [&](double z, const State& s) {
    const double psi = std::min(s[0], 1.0 - 1e-300);
    const double deficit = -std::expm1(q * std::log1p(-psi));  // 1 - phi^{p-1}
    State out;
    out << s[1], -(0.5 * std::exp(2.0 * z) - k.drift) * s[1] + k.reaction * (1.0 - psi) * deficit;
    return out;
  };
  // (phi, phi'); odd extension below zero only matters for rejected stages.
  auto direct_rhs = [&](double z, const State& s) {
    const double phi = s[0];
    const double mag = std::abs(phi);
    State out;
    out << s[1], -(0.5 * std::exp(2.0 * z) - k.drift) * s[1] - k.reaction * phi * (1.0 - std::pow(mag, q));
    return out;
  };

  StepControl sc;
  sc.rtol = controls.rtol;
  sc.min_step = controls.min_step;
  sc.max_step = controls.max_step;

  ShotResult result{ShotOutcome::undershoot, {}, {}, {}, {}, zeta_minus};
  auto record = [&](double z, double phi, double dphi, double one_minus) {
    result.zeta.push_back(z);
    result.phi.push_back(phi);
    result.dphi.push_back(dphi);
    result.one_minus_phi.push_back(one_minus);
  };

  double z = zeta_minus;
  double h = 1e-3;
  State s;
  s << seed.one_minus_phi, -seed.dphi;
  record(z, seed.phi, seed.dphi, seed.one_minus_phi);

  bool complement_phase = true;
  Integrator stepper(sc);
  while (z < zeta_plus) {
    const bool ok = complement_phase ? stepper.advance(complement_rhs, z, s, h, zeta_plus)
                                     : stepper.advance(direct_rhs, z, s, h, zeta_plus);
    if (!ok) {
      std::ostringstream msg;
      msg << "shoot: step size underflow at zeta = " << z << " (A = " << amplitude << ")";
      throw SolverError(msg.str());
    }
    if (!s.allFinite()) {
      std::ostringstream msg;
      msg << "shoot: non-finite state at zeta = " << z << " (A = " << amplitude << ")";
      throw SolverError(msg.str());
    }
    if (complement_phase) {
      record(z, 1.0 - s[0], -s[1], s[0]);
      if (s[1] < 0.0) {
        result.outcome = ShotOutcome::undershoot;
        result.end_zeta = z;
        return result;
      }
      if (s[0] >= kPhaseSwitch) {
        complement_phase = false;
        s << 1.0 - s[0], -s[1];
        stepper = Integrator(sc);
      }
    } else {
      record(z, s[0], s[1], 1.0 - s[0]);
      if (s[0] <= 0.0) {
        result.outcome = ShotOutcome::overshoot;
        result.end_zeta = z;
        return result;
      }
      if (s[1] >= 0.0) {
        result.outcome = ShotOutcome::undershoot;
        result.end_zeta = z;
        return result;
      }
    }
  }
  result.end_zeta = z;
  const double phi_end = result.phi.back();
  const double dphi_end = result.dphi.back();
  if (phi_end > controls.tail_tol) {
    result.outcome = ShotOutcome::undershoot;
  } else if (std::abs(dphi_end) <= controls.tail_tol) {
    result.outcome = ShotOutcome::within_tolerance;
  } else {
    result.outcome = ShotOutcome::overshoot;
  }
  return result;
}

AmplitudeBracket bisect_amplitude(const ModelParams& params, const ProfileTolerances& tol, double seed) {
  constexpr double kMin = 1e-12, kMax = 1e12;
  if (!(seed >= kMin && seed <= kMax)) throw std::invalid_argument("bisect_amplitude: seed outside [1e-12, 1e12]");
  ShootingControls controls;
  controls.rtol = tol.shoot_rtol;
  controls.tail_tol = tol.tail_tol;

  AmplitudeBracket bracket{0.0, 0.0, 0.0, {}};
  auto classify = [&](double amplitude) {
    const ShotOutcome o = shoot(params, amplitude, tol.zeta_min, tol.zeta_max, controls).outcome;
    bracket.log.push_back({amplitude, o});
    return o;
  };

  ShotOutcome o = classify(seed);
  if (o == ShotOutcome::within_tolerance) {
    bracket.undershoot = bracket.overshoot = bracket.amplitude = seed;
    return bracket;
  }
  double lo = seed, hi = seed;
  if (o == ShotOutcome::overshoot) {
    while (true) {
      lo /= 10.0;
      if (lo < kMin) throw SolverError("bisect_amplitude: no undershoot witness in [1e-12, 1e12]");
      o = classify(lo);
      if (o == ShotOutcome::within_tolerance) {
        bracket.undershoot = bracket.overshoot = bracket.amplitude = lo;
        return bracket;
      }
      if (o == ShotOutcome::undershoot) break;
      hi = lo;
    }
  } else {
    while (true) {
      hi *= 10.0;
      if (hi > kMax) throw SolverError("bisect_amplitude: no overshoot witness in [1e-12, 1e12]");
      o = classify(hi);
      if (o == ShotOutcome::within_tolerance) {
        bracket.undershoot = bracket.overshoot = bracket.amplitude = hi;
        return bracket;
      }
      if (o == ShotOutcome::overshoot) break;
      lo = hi;
    }
  }

  while (hi / lo - 1.0 > tol.amplitude_rel) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    o = classify(mid);
    if (o == ShotOutcome::within_tolerance) {
      lo = hi = mid;
      break;
    }
    (o == ShotOutcome::overshoot ? hi : lo) = mid;
  }
  bracket.undershoot = lo;
  bracket.overshoot = hi;
  bracket.amplitude = std::sqrt(lo * hi);
  return bracket;
}

Eigen::ArrayXd uniform_grid(double lo, double hi, double h) {
  if (!(hi > lo) || !(h > 0.0)) throw std::invalid_argument("uniform_grid: need lo < hi and h > 0");
  const double count = (hi - lo) / h;
  const auto n = static_cast<Eigen::Index>(std::llround(count));
  if (n < 2 || std::abs(count - static_cast<double>(n)) > 1e-9 * count) {
    throw std::invalid_argument("uniform_grid: (hi - lo) must be an integer multiple of h");
  }
  Eigen::ArrayXd z(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) z[i] = lo + static_cast<double>(i) * h;
  z[n] = hi;
  return z;
}

Eigen::ArrayXd tanh_initial_guess(const ModelParams&, const Eigen::ArrayXd& zeta) {
  // -ln((1 - tanh z)/2) = ln(1 + e^{2z}); the e^{2z}/4 term supplies the tail.
  return zeta.unaryExpr([](double z) {
    const double e2 = std::exp(2.0 * z);
    return std::log1p(e2) + 0.25 * e2;
  });
}

namespace {

struct CollocationSystem {
  const ProfileCoefficients<double>& k;
  const Eigen::ArrayXd& zeta;
  double h;
  double left_slope_factor;  // y' = kappa y at the left end
  double right_slope;        // y' at the right end

  Eigen::ArrayXd drift;  // e^{2z}/2 - c

  CollocationSystem(const ProfileCoefficients<double>& coeffs, const Eigen::ArrayXd& z, double step)
      : k(coeffs), zeta(z), h(step) {
    left_slope_factor = k.left_rate;
    const double zr = zeta[zeta.size() - 1];
    right_slope = 0.5 * std::exp(2.0 * zr) - k.right_power - 2.0 * k.right_correction * std::exp(-2.0 * zr);
    drift = 0.5 * (2.0 * zeta).exp() - k.drift;
  }

  // First and second central differences using boundary ghosts.
  void differences(const Eigen::ArrayXd& y, Eigen::ArrayXd& d1, Eigen::ArrayXd& d2) const {
    const Eigen::Index n = y.size();
    d1.resize(n);
    d2.resize(n);
    const double ghost_left = y[1] - 2.0 * h * left_slope_factor * y[0];
    const double ghost_right = y[n - 2] + 2.0 * h * right_slope;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ym = i == 0 ? ghost_left : y[i - 1];
      const double yp = i == n - 1 ? ghost_right : y[i + 1];
      d1[i] = (yp - ym) / (2.0 * h);
      d2[i] = (yp - 2.0 * y[i] + ym) / (h * h);
    }
  }

  // -y'' + y'^2 - (e^{2z}/2 - c) y' + k (1 - e^{-(p-1) y}) = 0
  Eigen::ArrayXd residual(const Eigen::ArrayXd& y) const {
    Eigen::ArrayXd d1, d2;
    differences(y, d1, d2);
    const double q = k.p - 1.0;
    return -d2 + d1.square() - drift * d1 - k.reaction * (-q * y).unaryExpr([](double v) { return std::expm1(v); });
  }

  Tridiagonal<double> jacobian(const Eigen::ArrayXd& y) const {
    Eigen::ArrayXd d1, d2;
    differences(y, d1, d2);
    const Eigen::Index n = y.size();
    const double q = k.p - 1.0;
    Tridiagonal<double> J(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double g = 2.0 * d1[i] - drift[i];
      const double lo = -1.0 / (h * h) - g / (2.0 * h);
      const double up = -1.0 / (h * h) + g / (2.0 * h);
      J.diag[i] = 2.0 / (h * h) + k.reaction * q * std::exp(-q * y[i]);
      J.lower[i] = lo;
      J.upper[i] = up;
    }
    // ghost_left depends on y0 and y1, ghost_right on y_{n-2}
    J.diag[0] += J.lower[0] * (-2.0 * h * left_slope_factor);
    J.upper[0] += J.lower[0];
    J.lower[0] = 0.0;
    J.lower[n - 1] += J.upper[n - 1];
    J.upper[n - 1] = 0.0;
    return J;
  }
};

}  // namespace

ProfileSolution collocate_profile(const ModelParams& params, const ProfileTolerances& tol,
                                  const Eigen::ArrayXd& initial_neg_log) {
  if (params.p() < 1.01) throw std::invalid_argument("collocate_profile: p < 1.01 is too close to the singular limit");
  const Eigen::ArrayXd zeta = uniform_grid(tol.zeta_min, tol.zeta_max, tol.grid_h);
  if (initial_neg_log.size() != zeta.size()) throw std::invalid_argument("collocate_profile: guess size mismatch");
  const ProfileCoefficients<double> k(params.p());
  const CollocationSystem sys(k, zeta, tol.grid_h);

  Eigen::ArrayXd y = initial_neg_log;
  Eigen::ArrayXd F = sys.residual(y);
  int iteration = 0;
  bool converged = false;
  for (; iteration < tol.newton_max_iterations; ++iteration) {
    const Eigen::VectorXd step = solve_tridiagonal(sys.jacobian(y), (-F).matrix());
    const Eigen::ArrayXd dy = step.array();
    if (!dy.allFinite()) throw SolverError("collocate_profile: non-finite Newton step");
    if ((dy.abs() / (1.0 + y.abs())).maxCoeff() <= 1e-12) {
      y += dy;
      F = sys.residual(y);
      converged = true;
      ++iteration;
      break;
    }
    const double r0 = F.abs().maxCoeff();
    double damping = 1.0;
    Eigen::ArrayXd trial, Ft;
    while (true) {
      trial = y + damping * dy;
      Ft = sys.residual(trial);
      if ((Ft.allFinite() && Ft.abs().maxCoeff() < r0) || damping < 1.0 / 1024.0) break;
      damping *= 0.5;
    }
    if (!Ft.allFinite()) throw SolverError("collocate_profile: residual became non-finite");
    y = trial;
    F = Ft;
  }
  if (!converged) {
    throw SolverError("collocate_profile: Newton did not converge in " + std::to_string(tol.newton_max_iterations) +
                      " iterations (residual " + std::to_string(F.abs().maxCoeff()) + ")");
  }

  Eigen::ArrayXd d1, d2;
  sys.differences(y, d1, d2);
  ProfileSolution sol;
  sol.curve = ProfileCurve::from_neg_log(zeta, y, d1);
  sol.grid_h = tol.grid_h;
  sol.newton_iterations = iteration;
  sol.collocation_amplitude = sol.curve.one_minus_phi[0] * std::exp(-k.left_rate * zeta[0]);

  const Eigen::Index n = zeta.size();
  double worst = 0.0;
  for (Eigen::Index i = 1; i < n - 1; ++i) {
    const double phi = sol.curve.phi[i];
    const double r = ode_residual(params, zeta[i], phi, -d1[i] * phi, (d1[i] * d1[i] - d2[i]) * phi);
    worst = std::max(worst, std::abs(r));
  }
  sol.max_residual = worst;
  if (!(worst <= tol.residual)) {
    throw SolverError("collocate_profile: residual " + std::to_string(worst) + " exceeds tolerance");
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(y[i] > y[i - 1])) throw SolverError("collocate_profile: profile is not strictly decreasing");
  }
  if (!(y[0] > 0.0) || !(d1 > 0.0).all()) throw SolverError("collocate_profile: profile leaves (0, 1)");
  return sol;
}

namespace {

Eigen::ArrayXd guess_from_shot(const ModelParams& params, const ShotResult& shot, const Eigen::ArrayXd& zeta) {
  const ProfileCoefficients<double> k(params.p());
  // Keep the part of the trajectory that is still far above the tail
  // tolerance; beyond it the slow mode contaminates the shot.
  constexpr double kReliablePhi = 1e-6;
  std::vector<double> zs, ys;
  for (std::size_t i = 0; i < shot.zeta.size(); ++i) {
    if (shot.phi[i] < kReliablePhi || shot.dphi[i] >= 0.0) break;
    const double psi = shot.one_minus_phi[i];
    const double y = psi < 0.5 ? -std::log1p(-psi) : -std::log(shot.phi[i]);
    if (!zs.empty() && !(shot.zeta[i] > zs.back())) continue;
    zs.push_back(shot.zeta[i]);
    ys.push_back(y);
  }
  if (zs.size() < 4) throw SolverError("solve_profile: shooting trajectory too short to seed collocation");
  const MonotoneCubic interp(Eigen::Map<Eigen::ArrayXd>(zs.data(), static_cast<Eigen::Index>(zs.size())),
                             Eigen::Map<Eigen::ArrayXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
  const double zs_end = zs.back();
  const double ys_end = ys.back();
  const double es_end = std::exp(2.0 * zs_end);
  return zeta.unaryExpr([&](double z) {
    if (z <= zs_end) return interp(std::max(z, interp.front()));
    return ys_end + 0.25 * (std::exp(2.0 * z) - es_end) - k.right_power * (z - zs_end);
  });
}

}  // namespace

ProfileSolution solve_profile(const ModelParams& params, const ProfileTolerances& tol) {
  if (params.p() < 1.01) throw std::invalid_argument("solve_profile: p < 1.01 is too close to the singular limit");
  const AmplitudeBracket bracket = bisect_amplitude(params, tol);
  ShootingControls controls;
  controls.rtol = tol.shoot_rtol;
  controls.tail_tol = tol.tail_tol;
  const ShotResult shot = shoot(params, bracket.amplitude, tol.zeta_min, tol.zeta_max, controls);
  const Eigen::ArrayXd zeta = uniform_grid(tol.zeta_min, tol.zeta_max, tol.grid_h);
  ProfileSolution sol = collocate_profile(params, tol, guess_from_shot(params, shot, zeta));
  sol.shooting_amplitude_A = bracket.amplitude;
  return sol;
}

}  // namespace selfsim
