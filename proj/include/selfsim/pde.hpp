// Time stepping of u_t = u_xx - u^p on [0, L] with u_x(0,t) = -alpha,
// u(L,t) = 0 and zero initial data.
#ifndef SELFSIM_PDE_HPP
#define SELFSIM_PDE_HPP

#include "selfsim/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

namespace selfsim {

class SpatialGrid {
 public:
  SpatialGrid(double length, Eigen::Index nodes);

  double length() const { return length_; }
  Eigen::Index nodes() const { return nodes_; }
  double dx() const { return dx_; }
  double x(Eigen::Index i) const { return dx_ * static_cast<double>(i); }
  Eigen::ArrayXd coordinates() const;

 private:
  double length_;
  Eigen::Index nodes_;
  double dx_;
};

/// Running integrals since t = 0 used to audit the mass balance
///   d/dt int u dx = alpha - int u^p dx - (outflow at x = L).
struct FluxLedger {
  double injected = 0.0;  // int alpha dt
  double absorbed = 0.0;  // int int u^p dx dt (trapezoid in x and t)
  double outflow = 0.0;   // int -u_x(L) dt
};

struct PdeState {
  SpatialGrid grid;
  Eigen::ArrayXd u;
  double t = 0.0;
  FluxLedger ledger;

  /// Trapezoid int_0^L u dx.
  double mass() const;
  /// Trapezoid int_0^L u^p dx.
  double absorption(double p) const;
};

PdeState init_state(const ModelParams& params, const SpatialGrid& grid);

/// One semi-implicit step: implicit diffusion, absorption linearised as
/// -(u_old)^{p-1} u_new, second-order ghost node for the flux condition.
/// The matrix is an M-matrix, so u stays nonnegative for any dt > 0.
PdeState step(const PdeState& state, const ModelParams& params, double dt);

struct TimeControls {
  double c_dt = 0.25;   // dt = min(c_dt dx^2, dt_max)
  double dt_max = 1e-3;

  double timestep(const SpatialGrid& grid) const;
};

/// Error raised by run_until with the time at which stepping failed.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Advances `state` to t_end and returns deep copies at each snapshot time,
/// shortening the last step before a snapshot so it is hit exactly.
std::vector<PdeState> run_until(PdeState& state, const ModelParams& params, double t_end,
                                std::span<const double> snapshot_times, const TimeControls& controls = {});

struct BalanceInterval {
  double t0, t1;
  double mass_rate;        // (M(t1) - M(t0)) / (t1 - t0)
  double source;           // alpha
  double mean_absorption;  // time average of int u^p dx
  double mean_outflow;
  double defect;           // mass_rate - (source - mean_absorption)
};

/// Audits consecutive snapshots (and t = 0 with zero mass before the first).
std::vector<BalanceInterval> flux_balance(const ModelParams& params, std::span<const PdeState> snapshots);

}  // namespace selfsim

#endif  // SELFSIM_PDE_HPP
