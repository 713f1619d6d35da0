#include "selfsim/profile.hpp"

#include <cmath>

namespace selfsim {

double CutoffEta::value(double z) const {
  if (z <= 0.0) return 1.0;
  if (z >= 1.0) return 0.0;
  return 1.0 - z * z * z * (10.0 + z * (-15.0 + 6.0 * z));
}

double CutoffEta::derivative(double z) const {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  const double w = z * (1.0 - z);
  return -30.0 * w * w;
}

double CutoffEta::second_derivative(double z) const {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  return -60.0 * z * (1.0 - z) * (1.0 - 2.0 * z);
}

namespace {

// (p - 1 - phi^2 (p + 1 - 2 phi^{p-1})) / (p-1)^2 from psi = 1 - phi without
// cancellation; equals 2(p+1)/(p-1)^2 * int_0^psi s(1 - s^{p-1}) at s = 1 - t.
double well_depth(double p, double phi, double psi) {
  const double q = p - 1.0;
  if (psi < 1e-4) {
    const double psi2 = psi * psi;
    return (p + 1.0) / q * psi2 * (1.0 - p / 3.0 * psi + (q - 1.0) * p / 12.0 * psi2);
  }
  const double deficit = -std::expm1(q * std::log(phi));  // 1 - phi^{p-1}
  return (q * psi * (2.0 - psi) - 2.0 * phi * phi * deficit) / (q * q);
}

// Trapezoid on a uniform grid.
double trapezoid(const Eigen::ArrayXd& f, double h, Eigen::Index stride) {
  const Eigen::Index n = f.size();
  double sum = 0.5 * (f[0] + f[n - 1]);
  for (Eigen::Index i = stride; i < n - 1; i += stride) sum += f[i];
  return sum * h * static_cast<double>(stride);
}

// Integral of f beyond an end node when f decays geometrically outward.
// `inner` is the neighbour one step inside the grid.
double exponential_tail(double end, double inner, double h, const char* side) {
  if (end == 0.0) return 0.0;
  if (end < 0.0 || !(inner > end)) {
    throw std::domain_error(std::string("energy: integrand is not decaying at the ") + side +
                            " end; candidate outside the admissible class");
  }
  const double rate = std::log(inner / end) / h;
  return end / rate;
}

}  // namespace

Eigen::ArrayXd energy_density(const ModelParams& params, const ProfileCurve& curve, const CutoffEta& eta) {
  const double p = params.p();
  const double q = p - 1.0;
  const Eigen::Index n = curve.size();
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = curve.zeta[i];
    const double phi = curve.phi[i];
    const double psi = curve.one_minus_phi[i];
    if (phi < 0.0 || psi < 0.0) throw std::domain_error("energy: candidate must satisfy 0 <= phi <= 1");
    const double log_rho = log_weight_rho(params, z);
    const double e = eta.value(z);
    const double dphi = curve.dphi[i];
    const double kinetic = dphi == 0.0 ? 0.0 : 0.5 * std::exp(log_rho + 2.0 * std::log(std::abs(dphi)));
    double potential;
    if (e == 1.0) {
      const double g = well_depth(p, phi, psi);
      potential = g > 0.0 ? std::exp(log_rho + std::log(g)) : 0.0;
    } else if (e == 0.0) {
      // -phi^2 (p+1-2phi^{p-1})/(p-1)^2, assembled in log space
      const double bracket = p + 1.0 - 2.0 * positive_pow(phi, q);
      potential = phi == 0.0 ? 0.0 : -std::exp(log_rho + 2.0 * curve.log_phi[i] + std::log(bracket) - 2.0 * std::log(q));
    } else {
      const double rho = std::exp(log_rho);
      potential = rho * (e / q - phi * phi * (p + 1.0 - 2.0 * positive_pow(phi, q)) / (q * q));
    }
    out[i] = kinetic + potential;
  }
  return out;
}

EnergyResult energy(const ModelParams& params, const ProfileCurve& curve, const CutoffEta& eta) {
  const Eigen::Index n = curve.size();
  if (n < 5 || (n - 1) % 2 != 0) throw std::invalid_argument("energy: need an even number (>= 4) of intervals");
  const double h = curve.zeta[1] - curve.zeta[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(curve.zeta[i] - curve.zeta[i - 1] - h) > 1e-9 * h) {
      throw std::invalid_argument("energy: grid must be uniform");
    }
  }
  const Eigen::ArrayXd f = energy_density(params, curve, eta);
  if (!f.allFinite()) throw std::domain_error("energy: non-finite integrand");

  EnergyResult r;
  r.quadrature = trapezoid(f, h, 1);
  r.quadrature_error = std::abs(r.quadrature - trapezoid(f, h, 2)) / 3.0;
  r.left_tail = exponential_tail(f[0], f[1], h, "left");
  r.right_tail = exponential_tail(f[n - 1], f[n - 2], h, "right");
  r.value = r.quadrature + r.left_tail + r.right_tail;
  const double floor = 1e-14 * std::max(1.0, std::abs(r.quadrature));
  r.tails_certified = r.left_tail + r.right_tail <= std::max(r.quadrature_error, floor);
  return r;
}

ProfileCurve geodesic_path(const ProfileCurve& phi1, const ProfileCurve& phi2, double t) {
  if (phi1.size() != phi2.size() || !(phi1.zeta == phi2.zeta).all()) {
    throw std::invalid_argument("geodesic_path: profiles live on different grids");
  }
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("geodesic_path: t must lie in [0, 1]");
  if (t == 0.0) return phi1;
  if (t == 1.0) return phi2;
  const Eigen::Index n = phi1.size();
  ProfileCurve out;
  out.zeta = phi1.zeta;
  out.phi.resize(n);
  out.dphi.resize(n);
  out.one_minus_phi.resize(n);
  out.log_phi.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l1 = phi1.log_phi[i], l2 = phi2.log_phi[i];
    // ln(t e^{2 l2} + (1-t) e^{2 l1}) / 2 without underflow
    const double hi = std::max(l1, l2);
    double log_phi;
    if (hi == -INFINITY) {
      log_phi = -INFINITY;
    } else {
      const double s = t * std::exp(2.0 * (l2 - hi)) + (1.0 - t) * std::exp(2.0 * (l1 - hi));
      log_phi = hi + 0.5 * std::log(s);
    }
    const double phi = std::exp(log_phi);
    const double a1 = phi1.one_minus_phi[i], a2 = phi2.one_minus_phi[i];
    // 1 - phi^t = (t (1 - phi2^2) + (1-t)(1 - phi1^2)) / (1 + phi^t)
    const double one_minus = (t * a2 * (2.0 - a2) + (1.0 - t) * a1 * (2.0 - a1)) / (1.0 + phi);
    double dphi = 0.0;
    if (phi > 0.0) {
      // (t phi2 phi2' + (1-t) phi1 phi1') / phi^t, with phi_k / phi^t = e^{l_k - l}
      dphi = t * std::exp(l2 - log_phi) * phi2.dphi[i] + (1.0 - t) * std::exp(l1 - log_phi) * phi1.dphi[i];
    }
    out.phi[i] = phi;
    out.dphi[i] = dphi;
    out.one_minus_phi[i] = one_minus;
    out.log_phi[i] = log_phi;
  }
  return out;
}

ProfileCurve eta_candidate(const Eigen::ArrayXd& zeta, const CutoffEta& eta) {
  const Eigen::Index n = zeta.size();
  ProfileCurve c;
  c.zeta = zeta;
  c.phi.resize(n);
  c.dphi.resize(n);
  c.one_minus_phi.resize(n);
  c.log_phi.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = zeta[i];
    const double v = eta.value(z);
    c.phi[i] = v;
    c.dphi[i] = eta.derivative(z);
    // 1 - eta is the smoothstep itself
    c.one_minus_phi[i] = z <= 0.0 ? 0.0 : (z >= 1.0 ? 1.0 : z * z * z * (10.0 + z * (-15.0 + 6.0 * z)));
    c.log_phi[i] = v > 0.0 ? std::log(v) : -INFINITY;
  }
  c.check_consistent();
  return c;
}

namespace {

// exp(-r^2/2) mollified to vanish with all derivatives at |r| = 1.
double bump(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double r2 = r * r;
  return std::exp(-0.5 * r2 - r2 / (1.0 - r2));
}

double bump_derivative(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double s = 1.0 - r * r;
  return bump(r) * (-r - 2.0 * r / (s * s));
}

}  // namespace

double BumpSum::value(double zeta) const {
  double v = 0.0;
  for (const auto& b : bumps) v += b.weight * bump((zeta - b.center) / b.width);
  return v;
}

double BumpSum::derivative(double zeta) const {
  double v = 0.0;
  for (const auto& b : bumps) v += b.weight * bump_derivative((zeta - b.center) / b.width) / b.width;
  return v;
}

ProfileCurve perturb_profile(const ProfileCurve& base, const BumpSum& bumps, double scale) {
  const Eigen::Index n = base.size();
  ProfileCurve out = base;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = base.zeta[i];
    const double eb = scale * bumps.value(z);
    if (!(std::abs(eb) < 1.0)) throw std::invalid_argument("perturb_profile: perturbation must satisfy |eps b| < 1");
    const double phi = base.phi[i], psi = base.one_minus_phi[i];
    out.phi[i] = phi * (1.0 + eb * psi);
    out.one_minus_phi[i] = psi * (1.0 - eb * phi);
    out.log_phi[i] = base.log_phi[i] + std::log1p(eb * psi);
    out.dphi[i] = base.dphi[i] * (1.0 + eb * (psi - phi)) + scale * bumps.derivative(z) * phi * psi;
  }
  return out;
}

}  // namespace selfsim
