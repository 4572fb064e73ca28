#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "reacherbench/arm_model.hpp"
#include "reacherbench/ddpg_agent.hpp"
#include "reacherbench/reacher_env.hpp"

namespace reacherbench {

/// Full description of one experiment: the arm, the task, the learner, and
/// the training/testing schedule. Serializes to a single JSON document with
/// the arm table inlined, so the config hash covers every semantic choice.
struct ExperimentConfig {
  ArmModel arm = ur5_model();
  EnvConfig env;
  AgentConfig agent;
  long episodes = 20000;
  int steps_per_episode = 100;
  int test_every = 100;
  int test_episodes = 100;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string network_profile = "paper";  // paper: 400/300 hidden; reduced: 64/64

  void validate() const;
  std::vector<int> hidden_sizes() const;

  /// Canonical form: alphabetically ordered keys, arm inlined.
  nlohmann::json to_json() const;
  /// base_dir resolves a relative "arm_file" reference.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir = {});
  static ExperimentConfig load_file(const std::filesystem::path& path);

  /// FNV-1a 64 over the canonical serialization; changes whenever any
  /// semantic field changes.
  std::uint64_t config_hash() const;
};

struct TestSessionRecord {
  long episode_index = 0;  // training episodes completed when the session ran
  int successes = 0;       // out of test_episodes
  double mean_return = 0.0;
};

/// Deterministic output of one seeded training run. Wall-clock metadata lives
/// in a sidecar file so the record itself is bitwise reproducible.
struct RunRecord {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<TestSessionRecord> sessions;
  std::string checkpoint_ref;
};

/// Line-delimited JSON: one header object, then one object per test session.
void write_run_record(const std::filesystem::path& path, const RunRecord& record);
RunRecord read_run_record(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool resume = true;              // continue from an existing checkpoint
  long stop_after_sessions = -1;   // stop once this many sessions exist (< 0: run all)
  bool quiet = false;              // suppress per-session progress on stderr
};

/// Executes the training schedule for one seed: episodes with exploration,
/// hindsight relabels, one train step per environment step after warm-up, a
/// deterministic test session every test_every episodes, and an incrementally
/// persisted record + checkpoint at every session boundary (crash-resumable).
RunRecord run_training(const ExperimentConfig& config, std::uint64_t seed,
                       const RunOptions& opts);

/// A test policy maps (env, observation) to an action; env access lets
/// reference policies read the episode goal.
using TestPolicy = std::function<Eigen::VectorXd(const ReacherEnv&, const Eigen::VectorXd&)>;

/// Runs test_episodes fresh episodes of the policy (no exploration) on env,
/// counting successes and mean undiscounted return. episode_index is recorded
/// verbatim.
TestSessionRecord run_test_session(const TestPolicy& policy, ReacherEnv& env, int test_episodes,
                                   long episode_index = 0);
TestSessionRecord run_test_session(DdpgAgent& agent, ReacherEnv& env, int test_episodes,
                                   long episode_index = 0);

struct CurvePoint {
  long episode_index = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Per-session mean success count across runs with a symmetric 65% Student-t
/// confidence interval (df = runs - 1). A single run yields a degenerate
/// zero-width interval. Records must share config hash and session layout.
std::vector<CurvePoint> aggregate_runs(const std::vector<RunRecord>& records);

/// Seed-stream derivation used by run_training; exposed so tools and tests
/// can reproduce the exact environments of a run.
std::uint64_t env_stream_seed(std::uint64_t run_seed);
std::uint64_t agent_stream_seed(std::uint64_t run_seed);
std::uint64_t test_stream_seed(std::uint64_t run_seed, long session_index);

/// Record/checkpoint/meta filenames for one seed under an output directory.
std::filesystem::path record_path(const std::filesystem::path& out_dir, std::uint64_t seed);
std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, std::uint64_t seed);
std::filesystem::path meta_path(const std::filesystem::path& out_dir, std::uint64_t seed);

}  // namespace reacherbench
