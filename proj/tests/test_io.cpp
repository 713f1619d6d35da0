#include "doctest.h"

#include "selfsim/io.hpp"

#include <fstream>

using namespace selfsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("selfsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config round-trips through JSON") {
  RunConfig c;
  c.p = 3.0;
  c.alpha = 0.25;
  c.grid.n = 513;
  c.time.snapshot_times = {0.5, 2.0};
  c.time.t_end = 2.0;
  c.analysis.b_search = false;
  c.seed = 99;
  const RunConfig back = config_from_json(config_to_json(c));
  CHECK(back == c);
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_from_json(nlohmann::json::object()) == RunConfig{});
}

TEST_CASE("config validation") {
  using nlohmann::json;
  CHECK_THROWS_AS(config_from_json(json{{"p", 0.5}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"alpha", -1.0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"unknown", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"grid", {{"nodes", 5}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"p", "two"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"time", {{"snapshot_times", {1.0, 0.5}}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"time", {{"t_end", 10.0}}}}), ConfigError);  // 100 > t_end
  CHECK_THROWS_AS(config_from_json(json{{"analysis", {{"window", {1.0, -1.0}}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"profile", {{"residual_tol", 0.0}}}}), ConfigError);
  CHECK_NOTHROW(config_from_json(json{{"alpha", 0.0}}));
  CHECK_FALSE(config_from_json(json{{"alpha", 0.0}}).params().has_alpha());
}

TEST_CASE("file names and number formatting") {
  CHECK(snapshot_filename(0.1) == "snap_t1.000000e-01.csv");
  CHECK(snapshot_filename(100.0) == "snap_t1.000000e+02.csv");
  CHECK(frame_filename(1.0) == "frame_t1.000000e+00.csv");
  CHECK(std::stod(format_number(0.1)) == 0.1);
  CHECK(std::strtod(format_number(5e-320).c_str(), nullptr) == 5e-320);
}

TEST_CASE("profile artifacts round-trip") {
  const fs::path dir = scratch("profile");
  const ModelParams params(2.0);
  const ProfileSolution s = solve_profile(params);
  write_profile(dir, params, s);
  const ProfileSolution back = read_profile(dir);
  CHECK(back.curve.size() == s.curve.size());
  CHECK((back.curve.phi - s.curve.phi).abs().maxCoeff() == 0.0);
  CHECK(back.shooting_amplitude_A == s.shooting_amplitude_A);
  const auto side = read_json(dir / files::kProfileJson);
  for (const char* key : {"p", "A", "max_residual", "zeta_min", "zeta_max", "grid_h"}) CHECK(side.contains(key));
  std::ifstream in(dir / files::kProfileCsv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "zeta,phi,dphi");
  CHECK_THROWS(read_profile(scratch("empty")));
}

TEST_CASE("snapshot artifacts round-trip") {
  const fs::path dir = scratch("snaps");
  const ModelParams params(2.0, 1.0);
  PdeState s = init_state(params, SpatialGrid(10.0, 65));
  const double times[] = {0.1, 0.2};
  const auto snaps = run_until(s, params, 0.2, times);
  RunRecord r{2.0, 1.0, 10.0, 65, 1e-3, 0.2, {0.1, 0.2}, flux_balance(params, snaps)};
  write_snapshots(dir, r, snaps);
  CHECK(fs::exists(dir / "snap_t1.000000e-01.csv"));
  const LoadedRun back = read_snapshots(dir);
  REQUIRE(back.snapshots.size() == 2);
  CHECK((back.snapshots[1].u - snaps[1].u).abs().maxCoeff() == 0.0);
  CHECK(back.record.balance.size() == 2);
  CHECK(back.record.balance[1].defect == r.balance[1].defect);
}

TEST_CASE("csv reader rejects malformed input") {
  const fs::path dir = scratch("csv");
  std::ofstream(dir / "a.csv") << "x,u\n1,2\n3,abc\n";
  CHECK_THROWS(read_csv(dir / "a.csv"));
  std::ofstream(dir / "b.csv") << "x,u\n1\n";
  CHECK_THROWS(read_csv(dir / "b.csv"));
  std::ofstream(dir / "c.csv") << "x,u\n1,2\n";
  CHECK(read_csv(dir / "c.csv").column("u")[0] == 2.0);
  CHECK_THROWS(read_csv(dir / "c.csv").column("v"));
  CHECK_THROWS(read_csv(dir / "missing.csv"));
}

TEST_CASE("property report JSON shape") {
  PropertyReport r;
  r.name = "demo";
  r.seed = 5;
  r.record(-1.0, {0.5, {}, 2.0});
  r.finish();
  const auto j = to_json(r);
  CHECK(j["name"] == "demo");
  CHECK(j["passed"] == false);
  CHECK(j["seed"] == 5);
  CHECK(j["witness"]["zeta"] == 0.5);
  CHECK(j["witness"]["t"] == 2.0);
  CHECK_FALSE(j["witness"].contains("x"));
}
