#include "selfsim/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace selfsim {

SpatialGrid::SpatialGrid(double length, Eigen::Index nodes) : length_(length), nodes_(nodes) {
  if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("SpatialGrid: length must be > 0");
  if (nodes < 64) throw std::invalid_argument("SpatialGrid: need at least 64 nodes");
  dx_ = length / static_cast<double>(nodes - 1);
}

Eigen::ArrayXd SpatialGrid::coordinates() const {
  Eigen::ArrayXd x(nodes_);
  for (Eigen::Index i = 0; i < nodes_; ++i) x[i] = this->x(i);
  return x;
}

double PdeState::mass() const {
  const Eigen::Index n = u.size();
  return grid.dx() * (u.sum() - 0.5 * (u[0] + u[n - 1]));
}

PdeState init_state(const ModelParams&, const SpatialGrid& grid) {
  return PdeState{grid, Eigen::ArrayXd::Zero(grid.nodes()), 0.0, {}};
}

namespace {

// u^{p-1} for u >= 0 with 0^{p-1} = 0; integer exponents avoid pow.
inline double absorption_rate(double u, double q) {
  if (q == 1.0) return u;
  if (q == 2.0) return u * u;
  if (q == 3.0) return u * u * u;
  return u > 0.0 ? std::pow(u, q) : 0.0;
}

// Trapezoid weights in x applied to g[i] = f(u[i]), with g at x = L equal to 0.
template <typename F>
double trapezoid_x(const Eigen::ArrayXd& u, double dx, F f) {
  const Eigen::Index n = u.size();
  double sum = 0.5 * (f(u[0]) + f(u[n - 1]));
  for (Eigen::Index i = 1; i < n - 1; ++i) sum += f(u[i]);
  return dx * sum;
}

// Reused storage for the forward sweep so the time loop does not allocate.
struct Workspace {
  Eigen::ArrayXd sweep;
  Eigen::ArrayXd rate;
  // int u^p dx of the current state when known from the previous step.
  double absorbed = -1.0;
};

// Advances state by dt in place. Off-diagonals are -r except the ghost-node
// row 0, whose upper entry is -2r; the diagonal 1 + 2r + dt u^{p-1} exceeds
// the off-diagonal sum, so every pivot stays >= 1 and no pivoting is needed.
void advance(PdeState& state, const ModelParams& params, double dt, Workspace& ws) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be > 0");
  const double q = params.p() - 1.0;
  const double alpha = params.source_flux();
  const double dx = state.grid.dx();
  const Eigen::Index n = state.grid.nodes();
  const Eigen::Index m = n - 1;  // node n-1 is the Dirichlet end
  const double r = dt / (dx * dx);
  Eigen::ArrayXd& u = state.u;
  ws.sweep.resize(m);
  ws.rate.resize(m);

  for (Eigen::Index i = 0; i < m; ++i) ws.rate[i] = absorption_rate(u[i], q);
  double absorbed_old = ws.absorbed;
  if (absorbed_old < 0.0) {
    absorbed_old = trapezoid_x(u, dx, [q](double v) { return absorption_rate(v, q) * v; });
  }

  // Thomas sweep, overwriting u with the modified right-hand side.
  const double centre = 1.0 + 2.0 * r;
  double inv = 1.0 / (centre + dt * ws.rate[0]);
  ws.sweep[0] = -2.0 * r * inv;
  u[0] = (u[0] + 2.0 * r * dx * alpha) * inv;
  for (Eigen::Index i = 1; i < m; ++i) {
    const double pivot = centre + dt * ws.rate[i] + r * ws.sweep[i - 1];
    if (!(pivot > 0.0)) {
      throw std::runtime_error("step: internal error, tridiagonal breakdown at row " + std::to_string(i));
    }
    inv = 1.0 / pivot;
    ws.sweep[i] = -r * inv;
    u[i] = (u[i] + r * u[i - 1]) * inv;
  }
  for (Eigen::Index i = m - 1; i-- > 0;) u[i] -= ws.sweep[i] * u[i + 1];
  u[m] = 0.0;
  if (!u.allFinite()) throw std::runtime_error("step: non-finite values after solve");
  state.t += dt;

  const double absorbed_new = trapezoid_x(u, dx, [q](double v) { return absorption_rate(v, q) * v; });
  ws.absorbed = absorbed_new;
  state.ledger.injected += alpha * dt;
  state.ledger.absorbed += 0.5 * dt * (absorbed_old + absorbed_new);
  state.ledger.outflow += dt * (u[m - 1] - u[m]) / dx;
}

}  // namespace

double PdeState::absorption(double p) const {
  return trapezoid_x(u, grid.dx(), [p](double v) { return v > 0.0 ? std::pow(v, p) : 0.0; });
}

PdeState step(const PdeState& state, const ModelParams& params, double dt) {
  PdeState next = state;
  Workspace ws;
  advance(next, params, dt, ws);
  return next;
}

double TimeControls::timestep(const SpatialGrid& grid) const {
  if (!(c_dt > 0.0) || !(dt_max > 0.0)) throw std::invalid_argument("TimeControls: c_dt and dt_max must be > 0");
  return std::min(c_dt * grid.dx() * grid.dx(), dt_max);
}

std::vector<PdeState> run_until(PdeState& state, const ModelParams& params, double t_end,
                                std::span<const double> snapshot_times, const TimeControls& controls) {
  if (!(t_end > state.t)) throw std::invalid_argument("run_until: t_end must exceed the current time");
  double previous = state.t;
  for (double ts : snapshot_times) {
    if (!(ts > previous) || ts > t_end) {
      throw std::invalid_argument("run_until: snapshot times must be increasing within (t, t_end]");
    }
    previous = ts;
  }
  const double dt = controls.timestep(state.grid);

  std::vector<double> stops(snapshot_times.begin(), snapshot_times.end());
  if (stops.empty() || stops.back() < t_end) stops.push_back(t_end);

  Workspace ws;
  std::vector<PdeState> snapshots;
  snapshots.reserve(snapshot_times.size());
  std::size_t next_snapshot = 0;
  for (double target : stops) {
    // Number of steps so that the final (shortened) one lands on target.
    const double span = target - state.t;
    const auto full = static_cast<long long>(std::floor(span / dt * (1.0 + 1e-12)));
    const double remainder = span - static_cast<double>(full) * dt;
    const bool tiny_remainder = remainder <= 1e-9 * dt;
    const long long steps = tiny_remainder ? full : full + 1;
    for (long long s = 0; s < steps; ++s) {
      const bool last = s == steps - 1;
      const double h = last ? target - state.t : dt;
      try {
        advance(state, params, h, ws);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << e.what() << " (at t = " << state.t << ")";
        throw StepFailure(msg.str(), state.t);
      }
    }
    state.t = target;
    if (next_snapshot < snapshot_times.size() && snapshot_times[next_snapshot] == target) {
      snapshots.push_back(state);
      ++next_snapshot;
    }
  }
  return snapshots;
}

std::vector<BalanceInterval> flux_balance(const ModelParams& params, std::span<const PdeState> snapshots) {
  std::vector<BalanceInterval> out;
  double t0 = 0.0, m0 = 0.0;
  FluxLedger l0{};
  for (const PdeState& s : snapshots) {
    const double dt = s.t - t0;
    if (!(dt > 0.0)) throw std::invalid_argument("flux_balance: snapshots must be at increasing times");
    BalanceInterval b;
    b.t0 = t0;
    b.t1 = s.t;
    const double m1 = s.mass();
    b.mass_rate = (m1 - m0) / dt;
    b.source = (s.ledger.injected - l0.injected) / dt;
    b.mean_absorption = (s.ledger.absorbed - l0.absorbed) / dt;
    b.mean_outflow = (s.ledger.outflow - l0.outflow) / dt;
    b.defect = b.mass_rate - (params.source_flux() - b.mean_absorption);
    out.push_back(b);
    t0 = s.t;
    m0 = m1;
    l0 = s.ledger;
  }
  return out;
}

}  // namespace selfsim
