// Run configuration and the CSV/JSON artifacts shared with downstream tools.
#ifndef SELFSIM_IO_HPP
#define SELFSIM_IO_HPP

#include "selfsim/harness.hpp"
#include "selfsim/pde.hpp"
#include "selfsim/profile.hpp"
#include "selfsim/similarity.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace selfsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double p = 2.0;
  double alpha = 1.0;  // 0 runs the sourceless problem
  struct Grid {
    double L = 125.0;
    long n = 4097;
    bool operator==(const Grid&) const = default;
  } grid;
  struct Time {
    double dt_cap = 1e-3;
    double c_dt = 0.25;
    double t_end = 100.0;
    std::vector<double> snapshot_times{0.1, 1.0, 10.0, 100.0};
    bool operator==(const Time&) const = default;
  } time;
  struct Profile {
    double zeta_min = -12.0;
    double zeta_max = 3.0;
    double grid_h = 1.0 / 256.0;
    double residual_tol = 1e-8;
    double amplitude_rel_tol = 1e-10;
    bool operator==(const Profile&) const = default;
  } profile;
  struct Analysis {
    double window_lo = -2.0;
    double window_hi = 2.0;
    double epsilon_scheme = 1e-3;
    bool b_search = true;  // false: use the shift implied by the sub-solution flux condition
    bool operator==(const Analysis&) const = default;
  } analysis;
  std::string output_dir = "out";
  std::uint64_t seed = 42;

  bool operator==(const RunConfig&) const = default;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  ModelParams params() const;
  ProfileTolerances tolerances() const;
  TimeControls time_controls() const;
  HarnessConfig harness() const;
};

/// Missing keys take defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

namespace files {
inline constexpr const char* kProfileCsv = "profile.csv";
inline constexpr const char* kProfileJson = "profile.json";
inline constexpr const char* kRunJson = "run.json";
inline constexpr const char* kDistancesCsv = "distances.csv";
inline constexpr const char* kSandwichJson = "sandwich.json";
inline constexpr const char* kPropertiesJson = "properties.json";
inline constexpr const char* kConfigEcho = "config.json";
}  // namespace files

/// t in fixed scientific notation with six decimals, e.g. 1.000000e-01.
std::string time_label(double t);
std::string snapshot_filename(double t);  // snap_t<time>.csv
std::string frame_filename(double t);     // frame_t<time>.csv

/// %.17g, so every double round-trips.
std::string format_number(double v);

void write_profile(const std::filesystem::path& dir, const ModelParams& params, const ProfileSolution& profile);

/// Rebuilds a profile from profile.csv and its sidecar. ln phi and 1 - phi
/// are recomputed from phi, so their precision is that of phi.
ProfileSolution read_profile(const std::filesystem::path& dir);

struct RunRecord {
  double p = 0.0;
  double alpha = 0.0;
  double L = 0.0;
  long n = 0;
  double dt = 0.0;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  std::vector<BalanceInterval> balance;
};

void write_snapshots(const std::filesystem::path& dir, const RunRecord& record, std::span<const PdeState> snapshots);

struct LoadedRun {
  RunRecord record;
  std::vector<PdeState> snapshots;
};

LoadedRun read_snapshots(const std::filesystem::path& dir);

void write_frames(const std::filesystem::path& dir, std::span<const SimilarityFrame> frames);
void write_distances(const std::filesystem::path& dir, std::span<const SimilarityFrame> frames,
                     std::span<const double> distances);

nlohmann::json to_json(const PropertyReport& r);
nlohmann::json to_json(const BalanceInterval& b);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Reads a CSV with a mandatory header; returns the columns in header order.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace selfsim

#endif  // SELFSIM_IO_HPP
