#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "reacherbench/analysis.hpp"
#include "reacherbench/errors.hpp"

using namespace reacherbench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("rb_ana_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

GridSpec wide_slice() {
  GridSpec spec;
  spec.cell_size = 0.1;
  spec.z_lo = -2.0;
  spec.z_hi = 2.0;
  return spec;
}

}  // namespace

TEST_CASE("grid spec validation") {
  GridSpec spec;
  spec.validate();
  spec.cell_size = 0.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.cell_size = 0.1;
  spec.z_lo = 0.9;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("binning uses floor indices, so negative coordinates work") {
  SuccessGrid grid(wide_slice());
  grid.record({0.05, 0.05, 0.0}, true);    // cell (0, 0)
  grid.record({-0.05, 0.05, 0.0}, false);  // cell (-1, 0)
  grid.record({-0.25, -0.31, 0.0}, true);  // cell (-3, -4)
  grid.record({0.05, 0.01, 0.0}, false);   // cell (0, 0) again

  const auto& cells = grid.cells();
  REQUIRE(cells.size() == 3);
  CHECK(cells.at({0, 0}).attempts == 2);
  CHECK(cells.at({0, 0}).successes == 1);
  CHECK(cells.at({-1, 0}).attempts == 1);
  CHECK(cells.at({-1, 0}).successes == 0);
  CHECK(cells.at({-3, -4}).attempts == 1);
  CHECK(cells.at({-3, -4}).successes == 1);
}

TEST_CASE("totals are preserved across cells") {
  SuccessGrid grid(wide_slice());
  RandomStream rng(5);
  long wins = 0;
  for (int i = 0; i < 500; ++i) {
    const bool success = rng.uniform() < 0.3;
    wins += success ? 1 : 0;
    grid.record({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0}, success);
  }
  CHECK(grid.total_attempts() == 500);
  CHECK(grid.total_successes() == wins);
  long summed = 0;
  for (const auto& [key, stats] : grid.cells()) summed += stats.attempts;
  CHECK(summed == 500);
}

TEST_CASE("out-of-slice goals cannot be recorded") {
  GridSpec spec;  // z in [0.7, 0.8]
  SuccessGrid grid(spec);
  CHECK(grid.in_slice({0.0, 0.0, 0.75}));
  CHECK_FALSE(grid.in_slice({0.0, 0.0, 0.5}));
  grid.record({0.3, 0.3, 0.7}, true);   // boundary included
  grid.record({0.3, 0.3, 0.8}, false);  // boundary included
  CHECK_THROWS_AS(grid.record({0.3, 0.3, 0.69}, true), ProtocolError);
}

TEST_CASE("success map episodes follow the deterministic policy") {
  EnvConfig env_cfg;
  env_cfg.region = GoalRegion::unconstrained();
  env_cfg.n_active = 3;
  env_cfg.max_steps = 100;
  ReacherEnv env(ur5_model(), env_cfg, 31);
  GridSpec grid = wide_slice();

  SUBCASE("a goal-chasing policy wins every in-slice attempt") {
    const TestPolicy cheat = [](const ReacherEnv& e, const Eigen::VectorXd&) {
      return Eigen::VectorXd(e.goal().generator_theta.head(e.action_dim()));
    };
    const SuccessGrid map = success_region_map(cheat, env, 60, grid);
    CHECK(map.total_attempts() == 60);  // slice covers the whole reachable set
    CHECK(map.total_successes() == map.total_attempts());
  }
  SUBCASE("a frozen policy wins nothing far from its pose") {
    const TestPolicy frozen = [](const ReacherEnv& e, const Eigen::VectorXd&) {
      return Eigen::VectorXd(Eigen::VectorXd::Zero(e.action_dim()));
    };
    const SuccessGrid map = success_region_map(frozen, env, 60, grid);
    CHECK(map.total_attempts() == 60);
    CHECK(map.total_successes() <= 3);
  }
  SUBCASE("a narrow slice filters the sampled goals") {
    GridSpec narrow;  // default [0.7, 0.8] band, rarely hit by ur5 goals
    const TestPolicy frozen = [](const ReacherEnv& e, const Eigen::VectorXd&) {
      return Eigen::VectorXd(Eigen::VectorXd::Zero(e.action_dim()));
    };
    const SuccessGrid map = success_region_map(frozen, env, 200, narrow);
    CHECK(map.total_attempts() < 100);
    for (const auto& [key, stats] : map.cells()) CHECK(stats.attempts > 0);
  }
}

TEST_CASE("success map csv has the documented shape") {
  TempDir dir("csv");
  SuccessGrid grid(wide_slice());
  grid.record({0.05, 0.05, 0.0}, true);
  grid.record({-0.15, 0.05, 0.0}, false);
  const fs::path path = dir.path / "map.csv";
  grid.write_csv(path);

  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "ix,iy,x_lo,y_lo,attempts,successes");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("learning curves round-trip through csv") {
  TempDir dir("curve");
  const fs::path path = dir.path / "curve.csv";

  SUBCASE("values survive to within 1e-12") {
    const std::vector<CurvePoint> curve = {
        {100, 30.0, 22.523764483442662, 37.47623551655734},
        {200, 50.0, -31.59258435760958, 131.59258435760958},
        {300, 1.0 / 3.0, 0.1234567890123456, 0.9876543210987654},
    };
    emit_curve(curve, path);
    const std::vector<CurvePoint> back = read_curve(path);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(back[i].episode_index == curve[i].episode_index);
      CHECK(std::abs(back[i].mean - curve[i].mean) <= 1e-12);
      CHECK(std::abs(back[i].ci_low - curve[i].ci_low) <= 1e-12);
      CHECK(std::abs(back[i].ci_high - curve[i].ci_high) <= 1e-12);
    }
  }
  SUBCASE("an empty curve is just the header") {
    emit_curve({}, path);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "episode_index,mean,ci_low,ci_high");
    CHECK_FALSE(std::getline(in, line));
    CHECK(read_curve(path).empty());
  }
  SUBCASE("a wrong header is rejected") {
    std::ofstream(path) << "episode,mean\n1,2\n";
    CHECK_THROWS_AS(read_curve(path), ParseError);
  }
  SUBCASE("a malformed row is rejected") {
    std::ofstream(path) << "episode_index,mean,ci_low,ci_high\n1,2\n";
    CHECK_THROWS_AS(read_curve(path), ParseError);
  }
}
