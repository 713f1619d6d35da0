#include "selfsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace selfsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

// Copies j[key] into out when present; rejects keys outside `allowed`.
template <typename T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type (" + e.what() + ")");
  }
}

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("config: unknown key '" + where + (where.empty() ? "" : ".") + k + "'");
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void RunConfig::validate() const {
  require(std::isfinite(p) && p > 1.0, "p must be > 1");
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
  require(std::isfinite(grid.L) && grid.L > 0.0, "grid.L must be > 0");
  require(grid.n >= 64, "grid.n must be >= 64");
  require(time.dt_cap > 0.0 && time.c_dt > 0.0, "time.dt_cap and time.c_dt must be > 0");
  require(std::isfinite(time.t_end) && time.t_end > 0.0, "time.t_end must be > 0");
  require(!time.snapshot_times.empty(), "time.snapshot_times must not be empty");
  double prev = 0.0;
  for (double t : time.snapshot_times) {
    require(t > prev && t <= time.t_end, "time.snapshot_times must be sorted ascending within (0, t_end]");
    prev = t;
  }
  require(profile.zeta_min <= -6.0 && profile.zeta_max >= 2.0, "profile window must contain [-6, 2]");
  require(profile.grid_h > 0.0, "profile.grid_h must be > 0");
  const double cells = (profile.zeta_max - profile.zeta_min) / profile.grid_h;
  require(std::abs(cells - std::round(cells)) <= 1e-9 * cells && std::llround(cells) % 2 == 0,
          "profile window must be an even number of grid_h steps");
  require(profile.residual_tol > 0.0 && profile.amplitude_rel_tol > 0.0, "profile tolerances must be > 0");
  require(analysis.window_hi > analysis.window_lo, "analysis.window must satisfy lo < hi");
  require(analysis.epsilon_scheme >= 0.0, "analysis.epsilon_scheme must be >= 0");
  require(!output_dir.empty(), "output_dir must not be empty");
}

ModelParams RunConfig::params() const {
  return alpha > 0.0 ? ModelParams(p, alpha) : ModelParams(p);
}

ProfileTolerances RunConfig::tolerances() const {
  ProfileTolerances t;
  t.zeta_min = profile.zeta_min;
  t.zeta_max = profile.zeta_max;
  t.grid_h = profile.grid_h;
  t.residual = profile.residual_tol;
  t.amplitude_rel = profile.amplitude_rel_tol;
  return t;
}

TimeControls RunConfig::time_controls() const { return {time.c_dt, time.dt_cap}; }

HarnessConfig RunConfig::harness() const {
  HarnessConfig h;
  h.epsilon_scheme = analysis.epsilon_scheme;
  h.seed = seed;
  h.window_lo = analysis.window_lo;
  h.window_hi = analysis.window_hi;
  return h;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  only_keys(j, {"p", "alpha", "grid", "time", "profile", "analysis", "output_dir", "seed"}, "");
  take(j, "p", c.p);
  take(j, "alpha", c.alpha);
  take(j, "output_dir", c.output_dir);
  take(j, "seed", c.seed);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    only_keys(g, {"L", "n"}, "grid");
    take(g, "L", c.grid.L);
    take(g, "n", c.grid.n);
  }
  if (j.contains("time")) {
    const json& t = j.at("time");
    only_keys(t, {"dt_cap", "c_dt", "t_end", "snapshot_times"}, "time");
    take(t, "dt_cap", c.time.dt_cap);
    take(t, "c_dt", c.time.c_dt);
    take(t, "t_end", c.time.t_end);
    take(t, "snapshot_times", c.time.snapshot_times);
  }
  if (j.contains("profile")) {
    const json& p = j.at("profile");
    only_keys(p, {"zeta_min", "zeta_max", "grid_h", "residual_tol", "amplitude_rel_tol"}, "profile");
    take(p, "zeta_min", c.profile.zeta_min);
    take(p, "zeta_max", c.profile.zeta_max);
    take(p, "grid_h", c.profile.grid_h);
    take(p, "residual_tol", c.profile.residual_tol);
    take(p, "amplitude_rel_tol", c.profile.amplitude_rel_tol);
  }
  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    only_keys(a, {"window", "epsilon_scheme", "b_search"}, "analysis");
    if (a.contains("window")) {
      std::vector<double> w;
      take(a, "window", w);
      require(w.size() == 2, "analysis.window must be [lo, hi]");
      c.analysis.window_lo = w[0];
      c.analysis.window_hi = w[1];
    }
    take(a, "epsilon_scheme", c.analysis.epsilon_scheme);
    take(a, "b_search", c.analysis.b_search);
  }
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  return json{
      {"p", c.p},
      {"alpha", c.alpha},
      {"grid", {{"L", c.grid.L}, {"n", c.grid.n}}},
      {"time",
       {{"dt_cap", c.time.dt_cap},
        {"c_dt", c.time.c_dt},
        {"t_end", c.time.t_end},
        {"snapshot_times", c.time.snapshot_times}}},
      {"profile",
       {{"zeta_min", c.profile.zeta_min},
        {"zeta_max", c.profile.zeta_max},
        {"grid_h", c.profile.grid_h},
        {"residual_tol", c.profile.residual_tol},
        {"amplitude_rel_tol", c.profile.amplitude_rel_tol}}},
      {"analysis",
       {{"window", {c.analysis.window_lo, c.analysis.window_hi}},
        {"epsilon_scheme", c.analysis.epsilon_scheme},
        {"b_search", c.analysis.b_search}}},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
  };
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON (" + e.what() + ")");
  }
  return config_from_json(j);
}

std::string time_label(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", t);
  return buf;
}

std::string snapshot_filename(double t) { return "snap_t" + time_label(t) + ".csv"; }
std::string frame_filename(double t) { return "frame_t" + time_label(t) + ".csv"; }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_profile(const fs::path& dir, const ModelParams& params, const ProfileSolution& profile) {
  fs::create_directories(dir);
  std::ofstream out = open_out(dir / files::kProfileCsv);
  out << "zeta,phi,dphi\n";
  const ProfileCurve& c = profile.curve;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    out << format_number(c.zeta[i]) << ',' << format_number(c.phi[i]) << ',' << format_number(c.dphi[i]) << '\n';
  }
  write_json(dir / files::kProfileJson, json{{"p", params.p()},
                                             {"A", profile.shooting_amplitude_A},
                                             {"collocation_amplitude", profile.collocation_amplitude},
                                             {"max_residual", profile.max_residual},
                                             {"zeta_min", profile.zeta_min()},
                                             {"zeta_max", profile.zeta_max()},
                                             {"grid_h", profile.grid_h},
                                             {"newton_iterations", profile.newton_iterations}});
}

ProfileSolution read_profile(const fs::path& dir) {
  const fs::path csv = dir / files::kProfileCsv, side = dir / files::kProfileJson;
  if (!fs::exists(csv) || !fs::exists(side)) {
    throw std::runtime_error("missing profile artifacts in " + dir.string() + " (run the profile command first)");
  }
  const CsvTable t = read_csv(csv);
  auto to_array = [](const std::vector<double>& v) {
    return Eigen::ArrayXd(Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  ProfileSolution s;
  s.curve = ProfileCurve::from_phi(to_array(t.column("zeta")), to_array(t.column("phi")), to_array(t.column("dphi")));
  const json j = read_json(side);
  s.shooting_amplitude_A = j.at("A").get<double>();
  s.collocation_amplitude = j.value("collocation_amplitude", 0.0);
  s.max_residual = j.at("max_residual").get<double>();
  s.grid_h = j.at("grid_h").get<double>();
  s.newton_iterations = j.value("newton_iterations", 0);
  return s;
}

json to_json(const BalanceInterval& b) {
  return json{{"t0", b.t0},
              {"t1", b.t1},
              {"mass_rate", b.mass_rate},
              {"source", b.source},
              {"mean_absorption", b.mean_absorption},
              {"mean_outflow", b.mean_outflow},
              {"defect", b.defect}};
}

void write_snapshots(const fs::path& dir, const RunRecord& r, std::span<const PdeState> snapshots) {
  fs::create_directories(dir);
  for (const PdeState& s : snapshots) {
    std::ofstream out = open_out(dir / snapshot_filename(s.t));
    out << "x,u\n";
    for (Eigen::Index i = 0; i < s.u.size(); ++i) out << format_number(s.grid.x(i)) << ',' << format_number(s.u[i]) << '\n';
  }
  json balance = json::array();
  for (const BalanceInterval& b : r.balance) balance.push_back(to_json(b));
  write_json(dir / files::kRunJson, json{{"p", r.p},
                                         {"alpha", r.alpha},
                                         {"L", r.L},
                                         {"n", r.n},
                                         {"dt", r.dt},
                                         {"t_end", r.t_end},
                                         {"snapshot_times", r.snapshot_times},
                                         {"flux_balance", balance}});
}

LoadedRun read_snapshots(const fs::path& dir) {
  const fs::path meta = dir / files::kRunJson;
  if (!fs::exists(meta)) throw std::runtime_error("missing " + meta.string() + " (run the pde command first)");
  const json j = read_json(meta);
  LoadedRun run;
  RunRecord& r = run.record;
  r.p = j.at("p").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.L = j.at("L").get<double>();
  r.n = j.at("n").get<long>();
  r.dt = j.at("dt").get<double>();
  r.t_end = j.at("t_end").get<double>();
  r.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
  for (const json& b : j.value("flux_balance", json::array())) {
    r.balance.push_back({b.at("t0").get<double>(), b.at("t1").get<double>(), b.at("mass_rate").get<double>(),
                         b.at("source").get<double>(), b.at("mean_absorption").get<double>(),
                         b.at("mean_outflow").get<double>(), b.at("defect").get<double>()});
  }
  const SpatialGrid grid(r.L, r.n);
  for (double t : r.snapshot_times) {
    const fs::path path = dir / snapshot_filename(t);
    if (!fs::exists(path)) throw std::runtime_error("missing snapshot " + path.string());
    const CsvTable csv = read_csv(path);
    const auto& x = csv.column("x");
    const auto& u = csv.column("u");
    if (static_cast<long>(u.size()) != r.n) throw std::runtime_error(path.string() + ": node count differs from run.json");
    PdeState s{grid, Eigen::ArrayXd(r.n), t, {}};
    for (long i = 0; i < r.n; ++i) {
      if (std::abs(x[i] - grid.x(i)) > 1e-9 * r.L) throw std::runtime_error(path.string() + ": grid differs from run.json");
      s.u[i] = u[i];
    }
    run.snapshots.push_back(std::move(s));
  }
  return run;
}

void write_frames(const fs::path& dir, std::span<const SimilarityFrame> frames) {
  fs::create_directories(dir);
  for (const SimilarityFrame& f : frames) {
    std::ofstream out = open_out(dir / frame_filename(f.t));
    out << "zeta,F\n";
    for (Eigen::Index i = 0; i < f.size(); ++i) out << format_number(f.zeta[i]) << ',' << format_number(f.F[i]) << '\n';
  }
}

void write_distances(const fs::path& dir, std::span<const SimilarityFrame> frames, std::span<const double> distances) {
  if (frames.size() != distances.size()) throw std::invalid_argument("write_distances: size mismatch");
  fs::create_directories(dir);
  std::ofstream out = open_out(dir / files::kDistancesCsv);
  out << "t,sup_distance\n";
  for (std::size_t k = 0; k < frames.size(); ++k) out << format_number(frames[k].t) << ',' << format_number(distances[k]) << '\n';
}

json to_json(const PropertyReport& r) {
  json w = json::object();
  if (r.witness.zeta) w["zeta"] = *r.witness.zeta;
  if (r.witness.x) w["x"] = *r.witness.x;
  if (r.witness.t) w["t"] = *r.witness.t;
  json j{{"name", r.name}, {"passed", r.passed}, {"worst_margin", r.worst_margin}, {"witness", w}, {"checked", r.checked}};
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return columns[k];
  }
  throw std::runtime_error("csv: missing column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw std::runtime_error(path.string() + ": missing header row");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  t.columns.resize(t.header.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k >= t.header.size()) throw std::runtime_error(path.string() + ": too many cells on row " + std::to_string(row));
      // strtod rather than stod: subnormal values are valid data, not errors
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) throw std::runtime_error(path.string() + ": bad number on row " + std::to_string(row));
      t.columns[k++].push_back(v);
    }
    if (k != t.header.size()) throw std::runtime_error(path.string() + ": too few cells on row " + std::to_string(row));
  }
  return t;
}

}  // namespace selfsim
