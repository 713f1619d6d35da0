// selfsim: profile solves, PDE runs, similarity analysis and the property
// harness, driven by one JSON config. Every artifact lands in output_dir.
#include "selfsim/io.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace selfsim;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
};

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  write_json(fs::path(cfg.output_dir) / files::kConfigEcho, config_to_json(cfg));
  return cfg;
}

void print_report(const PropertyReport& r) {
  std::printf("%s %-36s worst_margin=% .6e checked=%zu", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst_margin,
              r.checked);
  if (r.witness.zeta) std::printf(" zeta=%.6g", *r.witness.zeta);
  if (r.witness.x) std::printf(" x=%.6g", *r.witness.x);
  if (r.witness.t) std::printf(" t=%.6g", *r.witness.t);
  std::printf("\n");
}

// Replaces the searched b by the flux-condition estimate when b_search is off.
void apply_shift_policy(const RunConfig& cfg, const ModelParams& params, const ProfileSolution& profile,
                        FrameAnalysis& a) {
  if (cfg.analysis.b_search || a.frames.empty()) return;
  const TheoreticalShift s = theoretical_b(params, profile);
  Calibration c;
  c.b = s.b;
  c.offset_a = make_stationary<double>(params).offset_a;
  c.doublings = -1;
  for (const SimilarityFrame& f : a.frames) {
    c.reports.push_back(sandwich_check(params, f, profile, s.b, cfg.analysis.epsilon_scheme));
  }
  a.calibration = std::move(c);
  a.calibration_error.clear();
}

void check_run_matches(const RunConfig& cfg, const RunRecord& r) {
  if (r.p != cfg.p || r.alpha != cfg.alpha) {
    char msg[200];
    std::snprintf(msg, sizeof msg, "snapshots were produced with p=%g alpha=%g but the config has p=%g alpha=%g", r.p,
                  r.alpha, cfg.p, cfg.alpha);
    throw ConfigError(msg);
  }
}

int cmd_profile(const RunConfig& cfg) {
  const ModelParams params = cfg.params();
  const ProfileSolution s = solve_profile(params, cfg.tolerances());
  write_profile(cfg.output_dir, params, s);
  std::printf("max_residual = %.6e\n", s.max_residual);
  std::printf("A = %.12g\n", s.shooting_amplitude_A);
  return 0;
}

int cmd_pde(const RunConfig& cfg) {
  const ModelParams params = cfg.params();
  const SpatialGrid grid(cfg.grid.L, cfg.grid.n);
  const TimeControls controls = cfg.time_controls();
  PdeState state = init_state(params, grid);
  const std::vector<PdeState> snaps = run_until(state, params, cfg.time.t_end, cfg.time.snapshot_times, controls);
  RunRecord record{cfg.p, cfg.alpha, cfg.grid.L, cfg.grid.n, controls.timestep(grid), cfg.time.t_end,
                   cfg.time.snapshot_times, flux_balance(params, snaps)};
  write_snapshots(cfg.output_dir, record, snaps);

  const double tol = 1e-3 * cfg.alpha;
  bool ok = true;
  std::printf("%zu snapshots written, dt = %.6e\n", snaps.size(), record.dt);
  std::printf("%12s %12s %14s %14s %12s\n", "t0", "t1", "dM/dt", "alpha-<int u^p>", "defect");
  for (const BalanceInterval& b : record.balance) {
    const bool pass = std::abs(b.defect) <= tol;
    ok = ok && pass;
    std::printf("%12.6g %12.6g %14.8f %14.8f %12.3e %s\n", b.t0, b.t1, b.mass_rate, b.source - b.mean_absorption,
                b.defect, pass ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

int cmd_analyze(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  const ModelParams params = cfg.params();
  const ProfileSolution profile = read_profile(dir);
  const LoadedRun run = read_snapshots(dir);
  check_run_matches(cfg, run.record);
  const HarnessConfig h = cfg.harness();
  FrameAnalysis a = analyze_frames(params, profile, run.snapshots, h);
  apply_shift_policy(cfg, params, profile, a);

  write_frames(dir, a.frames);
  write_distances(dir, a.frames, a.distances);

  bool decreasing = true;
  for (std::size_t k = 0; k < a.distances.size(); ++k) {
    if (k > 0 && !(a.distances[k] < a.distances[k - 1])) decreasing = false;
    std::printf("t = %-10g sup_distance = %.6f\n", a.frames[k].t, a.distances[k]);
  }

  const TheoreticalShift theory = theoretical_b(params, profile);
  bool sandwich_ok = a.calibration.has_value();
  json frames = json::array();
  json s{{"epsilon", h.epsilon_scheme},
         {"method", cfg.analysis.b_search ? "search" : "theory"},
         {"offset_a", make_stationary<double>(params).offset_a},
         {"b_theory", theory.b},
         {"g_epsilon", theory.epsilon}};
  if (a.calibration) {
    for (std::size_t k = 0; k < a.calibration->reports.size(); ++k) {
      const SandwichReport& r = a.calibration->reports[k];
      sandwich_ok = sandwich_ok && r.passed();
      frames.push_back({{"t", a.frames[k].t}, {"lower", to_json(r.lower)}, {"upper", to_json(r.upper)}});
    }
    s["b"] = a.calibration->b;
    s["doublings"] = a.calibration->doublings >= 0 ? json(a.calibration->doublings) : json(nullptr);
  } else {
    s["b"] = nullptr;
    s["doublings"] = nullptr;
    s["error"] = a.calibration_error;
  }
  s["passed"] = sandwich_ok;
  s["frames"] = frames;
  write_json(dir / files::kSandwichJson, s);

  if (a.calibration) {
    std::printf("sandwich: b = %.6g (a = %.6g), %s\n", a.calibration->b, s["offset_a"].get<double>(),
                sandwich_ok ? "passed" : "FAILED");
  } else {
    std::printf("sandwich: FAILED (%s)\n", a.calibration_error.c_str());
  }
  std::printf("distances strictly decreasing: %s\n", decreasing ? "yes" : "NO");
  return sandwich_ok && decreasing ? 0 : 1;
}

int cmd_properties(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  const ModelParams params = cfg.params();
  const ProfileTolerances tol = cfg.tolerances();
  const HarnessConfig h = cfg.harness();
  const ProfileSolution profile = solve_profile(params, tol);

  std::vector<PropertyReport> reports = profile_properties(params, profile, tol, h);
  if (fs::exists(dir / files::kProfileCsv)) {
    const ProfileSolution stored = read_profile(dir);
    PropertyReport same;
    same.name = "profile.artifact_consistency";
    if (stored.curve.size() != profile.curve.size()) {
      same.record(-1.0, {});
    } else {
      for (Eigen::Index i = 0; i < profile.curve.size(); ++i) {
        const double z = profile.curve.zeta[i];
        same.record(1e-12 - std::abs(stored.curve.phi[i] - profile.curve.phi[i]), {z, {}, {}});
        same.record(1e-12 - std::abs(stored.curve.zeta[i] - z), {z, {}, {}});
      }
    }
    reports.push_back(same.finish());
  }
  for (auto&& group : {comparison_properties(params, profile, h), poincare_properties(params, h),
                       energy_properties(params, profile, h)}) {
    reports.insert(reports.end(), group.begin(), group.end());
  }
  if (fs::exists(dir / files::kRunJson)) {
    const LoadedRun run = read_snapshots(dir);
    check_run_matches(cfg, run.record);
    for (PropertyReport& r : snapshot_properties(params, run.snapshots, run.record.balance, h)) {
      reports.push_back(std::move(r));
    }
    FrameAnalysis a = analyze_frames(params, profile, run.snapshots, h);
    apply_shift_policy(cfg, params, profile, a);
    for (PropertyReport& r : frame_properties(params, profile, a, h)) reports.push_back(std::move(r));
  } else {
    std::printf("note: no run.json in %s, snapshot and frame checks skipped\n", dir.c_str());
  }

  json out = json::array();
  bool ok = true;
  for (const PropertyReport& r : reports) {
    print_report(r);
    out.push_back(to_json(r));
    ok = ok && r.passed;
  }
  write_json(dir / files::kPropertiesJson, out);
  std::printf("%s: %zu checks\n", ok ? "all passed" : "FAILURES", reports.size());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar profile, PDE runs and property checks for u_t = u_xx - u^p with a boundary source"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"profile", "Solve the self-similar profile and write profile.csv/profile.json", cmd_profile},
      {"pde", "Run the PDE and write snapshot CSVs plus run.json", cmd_pde},
      {"analyze", "Build similarity frames, distances.csv and sandwich.json", cmd_analyze},
      {"properties", "Run the property harness and write properties.json", cmd_properties},
  };
  CommonOptions opts;
  int (*selected)(const RunConfig&) = nullptr;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opts.config_path, "JSON config (defaults apply when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--output-dir", opts.output_dir, "Override output_dir from the config");
    sub->callback([&selected, run = c.run] { selected = run; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    return selected(resolve_config(opts));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const StepFailure& e) {
    std::fprintf(stderr, "error: time stepping failed at t = %.9g: %s\n", e.time(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
