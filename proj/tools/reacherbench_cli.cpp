// Command-line workbench driver: training runs, policy evaluation, curve
// aggregation, success-region maps, and region feasibility reports.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "reacherbench/analysis.hpp"
#include "reacherbench/checkpoint.hpp"
#include "reacherbench/errors.hpp"
#include "reacherbench/experiment.hpp"

namespace fs = std::filesystem;
using namespace reacherbench;

namespace {

// Builds the env and agent a checkpoint expects, then restores its state.
struct LoadedPolicy {
  ReacherEnv env;
  DdpgAgent agent;
};

LoadedPolicy load_policy(const fs::path& checkpoint, const ExperimentConfig& config,
                         std::uint64_t env_seed) {
  LoadedPolicy p{
      ReacherEnv(config.arm, config.env, env_seed),
      DdpgAgent(3 * config.env.n_active + 6,
                config.arm.restrict_active(config.env.n_active).active_lower(),
                config.arm.restrict_active(config.env.n_active).active_upper(), config.agent,
                config.hidden_sizes(), 0)};
  RandomStream discard(0);  // training streams are irrelevant for evaluation
  load_checkpoint(checkpoint, p.agent, discard);
  return p;
}

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir, bool fresh) {
  const ExperimentConfig config = ExperimentConfig::load_file(config_path);
  RunOptions opts;
  opts.out_dir = out_dir;
  opts.resume = !fresh;
  std::vector<std::uint64_t> seeds = seed ? std::vector<std::uint64_t>{*seed} : config.seeds;
  for (std::uint64_t s : seeds) {
    const RunRecord record = run_training(config, s, opts);
    std::cout << "seed " << s << ": " << record.sessions.size() << " test sessions -> "
              << record_path(out_dir, s).string() << "\n";
  }
  return 0;
}

int cmd_test(const std::string& checkpoint, const std::string& config_path, int episodes,
             std::uint64_t seed) {
  const ExperimentConfig config = ExperimentConfig::load_file(config_path);
  LoadedPolicy p = load_policy(checkpoint, config, seed);
  const TestSessionRecord session = run_test_session(p.agent, p.env, episodes);
  std::cout << "successes: " << session.successes << "/" << episodes
            << "\nmean_return: " << session.mean_return << "\n";
  return 0;
}

int cmd_aggregate(const std::string& dir, std::string out_file) {
  std::vector<RunRecord> records;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) records.push_back(read_run_record(f));
  if (records.empty()) {
    std::cerr << "warning: no .jsonl run records in " << dir << "; emitting header-only curve\n";
  } else if (records.size() == 1) {
    std::cerr << "warning: single run; confidence intervals are degenerate (zero width)\n";
  }
  const std::vector<CurvePoint> curve = aggregate_runs(records);
  if (out_file.empty()) out_file = (fs::path(dir) / "curve.csv").string();
  emit_curve(curve, out_file);
  std::cout << "aggregated " << records.size() << " runs, " << curve.size() << " sessions -> "
            << out_file << "\n";
  return 0;
}

int cmd_map(const std::string& checkpoint, const std::string& config_path, long samples,
            const std::vector<double>& slice, double cell, std::string out_file,
            std::uint64_t seed) {
  const ExperimentConfig config = ExperimentConfig::load_file(config_path);
  LoadedPolicy p = load_policy(checkpoint, config, seed);
  GridSpec grid;
  grid.cell_size = cell;
  grid.z_lo = slice.at(0);
  grid.z_hi = slice.at(1);
  const SuccessGrid map = success_region_map(
      [&](const ReacherEnv&, const Eigen::VectorXd& obs) {
        return p.agent.select_action(obs, /*explore=*/false);
      },
      p.env, samples, grid);
  if (out_file.empty()) out_file = "map.csv";
  map.write_csv(out_file);
  std::cout << "sampled " << samples << " goals, " << map.total_attempts() << " in slice ["
            << grid.z_lo << ", " << grid.z_hi << "], " << map.total_successes()
            << " reached -> " << out_file << "\n";
  return 0;
}

int cmd_region_report(const std::string& config_path, long samples, std::uint64_t seed) {
  const ExperimentConfig config = ExperimentConfig::load_file(config_path);
  const ArmModel model = config.arm.restrict_active(config.env.n_active);
  const JointVector start = config.env.resolved_start_theta(model);

  std::cout << "arm: " << (model.name().empty() ? "(unnamed)" : model.name()) << ", "
            << model.total_joints() << " joints, " << model.active_joints() << " active\n"
            << "reach bound: " << model.reach_bound() << " m\n"
            << "region: " << config.env.region.describe() << "\n";

  RandomStream rng(seed);
  JointVector candidate = start;
  long hits = 0;
  for (long i = 0; i < samples; ++i) {
    for (int j = 0; j < model.active_joints(); ++j) {
      candidate[j] = rng.uniform(model.limit(j).lo, model.limit(j).hi);
    }
    if (config.env.region.contains(model.forward_kinematics(candidate))) ++hits;
  }
  const double rate = static_cast<double>(hits) / static_cast<double>(samples);
  std::cout << "sampling acceptance rate: " << rate << " (" << hits << "/" << samples << ")\n";
  if (hits == 0) {
    std::cout << "note: no candidate landed in the region; goal sampling would fail\n";
  } else {
    std::cout << "expected rejections per goal: " << (1.0 / rate) - 1.0 << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reacher benchmark workbench"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, out_str;
  std::optional<std::uint64_t> seed_opt;
  std::uint64_t seed_val = 12345;
  bool fresh = false;
  int episodes = 100;
  long samples = 10000;
  std::vector<double> slice = {0.7, 0.8};
  double cell = 0.1;

  auto* train = app.add_subcommand("train", "Run seeded training per the config schedule");
  train->add_option("config", config_path, "experiment config (JSON)")->required();
  train->add_option("--seed", seed_opt, "train only this seed (default: all in config)");
  train->add_option("--out", out_str, "output directory")->default_val(".");
  train->add_flag("--fresh", fresh, "ignore existing checkpoints instead of resuming");

  auto* test = app.add_subcommand("test", "Evaluate a checkpointed policy without exploration");
  test->add_option("checkpoint", checkpoint, "checkpoint file")->required();
  test->add_option("config", config_path, "experiment config (JSON)")->required();
  test->add_option("--episodes", episodes, "test episodes")->default_val(100);
  test->add_option("--seed", seed_val, "goal-sampling seed")->default_val(12345);

  auto* aggregate = app.add_subcommand("aggregate", "Combine run records into a mean/CI curve");
  aggregate->add_option("dir", config_path, "directory of .jsonl run records")->required();
  aggregate->add_option("--out", out_str, "curve CSV path (default <dir>/curve.csv)");

  auto* map = app.add_subcommand("map", "Per-cell success map of a policy over a z-slice");
  map->add_option("checkpoint", checkpoint, "checkpoint file")->required();
  map->add_option("config", config_path, "experiment config (JSON)")->required();
  map->add_option("--samples", samples, "goals to sample")->default_val(10000);
  map->add_option("--slice", slice, "z-slice bounds")->expected(2);
  map->add_option("--cell", cell, "grid cell size (m)")->default_val(0.1);
  map->add_option("--out", out_str, "grid CSV path (default map.csv)");
  map->add_option("--seed", seed_val, "goal-sampling seed")->default_val(12345);

  auto* report = app.add_subcommand("region-report", "Region bounds and acceptance-rate estimate");
  report->add_option("config", config_path, "experiment config (JSON)")->required();
  report->add_option("--samples", samples, "candidates for the rate estimate")->default_val(10000);
  report->add_option("--seed", seed_val, "sampling seed")->default_val(12345);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // nonzero parse outcomes are usage errors
  }

  try {
    if (train->parsed()) return cmd_train(config_path, seed_opt, out_str, fresh);
    if (test->parsed()) return cmd_test(checkpoint, config_path, episodes, seed_val);
    if (aggregate->parsed()) return cmd_aggregate(config_path, out_str);
    if (map->parsed()) return cmd_map(checkpoint, config_path, samples, slice, cell, out_str,
                                      seed_val);
    if (report->parsed()) return cmd_region_report(config_path, samples, seed_val);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
