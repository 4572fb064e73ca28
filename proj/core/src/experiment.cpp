#include "reacherbench/experiment.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "reacherbench/checkpoint.hpp"
#include "reacherbench/errors.hpp"

namespace reacherbench {

namespace {

constexpr std::uint64_t kEnvStreamTag = 0x454e56;    // train-env goal sampling
constexpr std::uint64_t kAgentStreamTag = 0x41474e;  // init, noise, batch sampling
constexpr std::uint64_t kTestStreamTag = 0x544553;   // per-session test envs

nlohmann::json arm_to_json(const ArmModel& arm) {
  nlohmann::json links = nlohmann::json::array();
  for (const LinkRow& row : arm.links()) {
    links.push_back({row.a, row.d, row.alpha, row.theta_offset});
  }
  nlohmann::json limits = nlohmann::json::array();
  for (const JointLimit& lim : arm.limits()) limits.push_back({lim.lo, lim.hi});
  return {{"name", arm.name()},
          {"base_height", arm.base_height()},
          {"links", links},
          {"limits", limits}};
}

ArmModel arm_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("links") || !j.contains("limits")) {
    throw ParseError("arm: expected object with 'links' and 'limits' arrays");
  }
  std::vector<LinkRow> links;
  for (const auto& row : j.at("links")) {
    if (!row.is_array() || row.size() != 4) {
      throw ParseError("arm: each link row must be [a, d, alpha, theta_offset]");
    }
    links.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                     row[3].get<double>()});
  }
  std::vector<JointLimit> limits;
  for (const auto& lim : j.at("limits")) {
    if (!lim.is_array() || lim.size() != 2) throw ParseError("arm: each limit must be [lo, hi]");
    limits.push_back({lim[0].get<double>(), lim[1].get<double>()});
  }
  return ArmModel(std::move(links), std::move(limits), j.value("base_height", 0.0),
                  j.value("name", std::string{}));
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::uint64_t parse_hash_hex(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

}  // namespace

void ExperimentConfig::validate() const {
  env.validate();
  agent.validate();
  if (episodes < 0) throw ValidationError("experiment config: episodes must be >= 0");
  if (steps_per_episode < 1) {
    throw ValidationError("experiment config: steps_per_episode must be >= 1");
  }
  if (env.max_steps != steps_per_episode) {
    throw ValidationError("experiment config: env max_steps (" + std::to_string(env.max_steps) +
                          ") conflicts with steps_per_episode (" +
                          std::to_string(steps_per_episode) + ")");
  }
  if (test_every < 1) throw ValidationError("experiment config: test_every must be >= 1");
  if (test_episodes < 1) throw ValidationError("experiment config: test_episodes must be >= 1");
  if (seeds.empty()) throw ValidationError("experiment config: seeds must be nonempty");
  if (network_profile != "paper" && network_profile != "reduced") {
    throw ValidationError("experiment config: network_profile must be 'paper' or 'reduced'");
  }
  if (env.n_active > arm.total_joints()) {
    throw ValidationError("experiment config: n_active exceeds the arm's joint count");
  }
}

std::vector<int> ExperimentConfig::hidden_sizes() const {
  if (network_profile == "reduced") return {64, 64};
  return {400, 300};
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"arm", arm_to_json(arm)},
          {"env", env.to_json()},
          {"agent", agent.to_json()},
          {"episodes", episodes},
          {"steps_per_episode", steps_per_episode},
          {"test_every", test_every},
          {"test_episodes", test_episodes},
          {"seeds", seeds},
          {"network_profile", network_profile}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("experiment config: expected a JSON object");
  ExperimentConfig cfg;
  if (j.contains("arm") && j.contains("arm_file")) {
    throw ParseError("experiment config: give either 'arm' or 'arm_file', not both");
  }
  if (j.contains("arm")) {
    cfg.arm = arm_from_json(j.at("arm"));
  } else if (j.contains("arm_file")) {
    std::filesystem::path p = j.at("arm_file").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.arm = ArmModel::load_file(p);
  } else {
    throw ParseError("experiment config: missing 'arm' or 'arm_file'");
  }
  cfg.episodes = j.value("episodes", cfg.episodes);
  cfg.steps_per_episode = j.value("steps_per_episode", cfg.steps_per_episode);
  cfg.test_every = j.value("test_every", cfg.test_every);
  cfg.test_episodes = j.value("test_episodes", cfg.test_episodes);
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.network_profile = j.value("network_profile", cfg.network_profile);

  if (!j.contains("env")) throw ParseError("experiment config: missing 'env' section");
  nlohmann::json env_json = j.at("env");
  // The step budget lives on the schedule; mirror it into the env unless the
  // env section pins its own (conflicts are rejected by validate()).
  if (!env_json.contains("max_steps")) env_json["max_steps"] = cfg.steps_per_episode;
  cfg.env = EnvConfig::from_json(env_json);
  cfg.agent = j.contains("agent") ? AgentConfig::from_json(j.at("agent")) : AgentConfig{};
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open experiment config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("experiment config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

std::uint64_t ExperimentConfig::config_hash() const {
  const std::string canonical = to_json().dump();
  std::uint64_t h = 14695981039346656037ull;  // FNV-1a 64
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t env_stream_seed(std::uint64_t run_seed) {
  return mix_seed(run_seed, kEnvStreamTag);
}

std::uint64_t agent_stream_seed(std::uint64_t run_seed) {
  return mix_seed(run_seed, kAgentStreamTag);
}

std::uint64_t test_stream_seed(std::uint64_t run_seed, long session_index) {
  return mix_seed(mix_seed(run_seed, kTestStreamTag), static_cast<std::uint64_t>(session_index));
}

std::filesystem::path record_path(const std::filesystem::path& out_dir, std::uint64_t seed) {
  return out_dir / ("run_seed" + std::to_string(seed) + ".jsonl");
}

std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, std::uint64_t seed) {
  return out_dir / ("run_seed" + std::to_string(seed) + ".ckpt");
}

std::filesystem::path meta_path(const std::filesystem::path& out_dir, std::uint64_t seed) {
  return out_dir / ("run_seed" + std::to_string(seed) + ".meta.json");
}

namespace {

std::string header_line(const RunRecord& record) {
  const nlohmann::json j = {{"type", "header"},
                            {"config_hash", hash_hex(record.config_hash)},
                            {"seed", record.seed},
                            {"checkpoint", record.checkpoint_ref}};
  return j.dump();
}

std::string session_line(const TestSessionRecord& s) {
  const nlohmann::json j = {{"type", "session"},
                            {"episode_index", s.episode_index},
                            {"successes", s.successes},
                            {"mean_return", s.mean_return}};
  return j.dump();
}

TestSessionRecord session_from_json(const nlohmann::json& j) {
  TestSessionRecord s;
  s.episode_index = j.at("episode_index").get<long>();
  s.successes = j.at("successes").get<int>();
  s.mean_return = j.at("mean_return").get<double>();
  return s;
}

}  // namespace

void write_run_record(const std::filesystem::path& path, const RunRecord& record) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError("run record: cannot open " + path.string() + " for writing");
  out << header_line(record) << '\n';
  for (const TestSessionRecord& s : record.sessions) out << session_line(s) << '\n';
  if (!out) throw LoadError("run record: write failed for " + path.string());
}

RunRecord read_run_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("run record: cannot open " + path.string());
  RunRecord record;
  std::string line;
  bool have_header = false;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      // A torn final line is expected after a crash mid-append; anything
      // earlier is corruption.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ParseError("run record " + path.string() + " line " + std::to_string(line_no) +
                       ": malformed JSON");
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      record.config_hash = parse_hash_hex(j.at("config_hash").get<std::string>());
      record.seed = j.at("seed").get<std::uint64_t>();
      record.checkpoint_ref = j.value("checkpoint", "");
      have_header = true;
    } else if (type == "session") {
      record.sessions.push_back(session_from_json(j));
    } else {
      throw ParseError("run record " + path.string() + " line " + std::to_string(line_no) +
                       ": unknown type '" + type + "'");
    }
  }
  if (!have_header) throw ParseError("run record " + path.string() + ": missing header line");
  return record;
}

TestSessionRecord run_test_session(const TestPolicy& policy, ReacherEnv& env, int test_episodes,
                                   long episode_index) {
  if (test_episodes < 1) throw ValidationError("test session: test_episodes must be >= 1");
  TestSessionRecord record;
  record.episode_index = episode_index;
  double total_return = 0.0;
  for (int ep = 0; ep < test_episodes; ++ep) {
    Eigen::VectorXd obs = env.reset();
    double ep_return = 0.0;
    while (true) {
      const Eigen::VectorXd action = policy(env, obs);
      const StepResult res = env.step(action);
      ep_return += res.reward;
      obs = res.observation;
      if (res.success) {
        ++record.successes;
        break;
      }
      if (res.truncated) break;
    }
    total_return += ep_return;
  }
  record.mean_return = total_return / static_cast<double>(test_episodes);
  return record;
}

TestSessionRecord run_test_session(DdpgAgent& agent, ReacherEnv& env, int test_episodes,
                                   long episode_index) {
  return run_test_session(
      [&agent](const ReacherEnv&, const Eigen::VectorXd& obs) {
        return agent.select_action(obs, /*explore=*/false);
      },
      env, test_episodes, episode_index);
}

namespace {

void write_meta(const std::filesystem::path& path, std::uint64_t seed,
                std::uint64_t config_hash, long episodes_done,
                std::chrono::system_clock::time_point started,
                std::chrono::steady_clock::time_point t0) {
  const auto now = std::chrono::system_clock::now();
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  const auto to_unix = [](std::chrono::system_clock::time_point tp) {
    return std::chrono::duration_cast<std::chrono::seconds>(tp.time_since_epoch()).count();
  };
  const nlohmann::json j = {{"seed", seed},
                            {"config_hash", hash_hex(config_hash)},
                            {"episodes_done", episodes_done},
                            {"started_unix", to_unix(started)},
                            {"updated_unix", to_unix(now)},
                            {"elapsed_seconds", elapsed.count()}};
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
}

}  // namespace

RunRecord run_training(const ExperimentConfig& config, std::uint64_t seed,
                       const RunOptions& opts) {
  config.validate();
  std::filesystem::create_directories(opts.out_dir);
  const std::filesystem::path rec_path = record_path(opts.out_dir, seed);
  const std::filesystem::path ckpt_path = checkpoint_path(opts.out_dir, seed);

  RunRecord record;
  record.config_hash = config.config_hash();
  record.seed = seed;
  record.checkpoint_ref = ckpt_path.filename().string();

  ReacherEnv env(config.arm, config.env, env_stream_seed(seed));
  DdpgAgent agent(env.obs_dim(), env.model().active_lower(), env.model().active_upper(),
                  config.agent, config.hidden_sizes(), agent_stream_seed(seed));

  long start_episode = 0;
  if (opts.resume && std::filesystem::exists(ckpt_path)) {
    const CheckpointHeader header = load_checkpoint(ckpt_path, agent, env.rng());
    if (header.config_hash != record.config_hash) {
      throw LoadError("resume: checkpoint belongs to a different config");
    }
    if (header.seed != seed) throw LoadError("resume: checkpoint belongs to a different seed");
    start_episode = static_cast<long>(header.episodes_done);
    if (!std::filesystem::exists(rec_path)) {
      throw LoadError("resume: checkpoint present but record file " + rec_path.string() +
                      " is missing; remove the checkpoint to restart from scratch");
    }
    const RunRecord existing = read_run_record(rec_path);
    for (const TestSessionRecord& s : existing.sessions) {
      // Sessions past the checkpoint (torn by a crash between the record
      // append and the checkpoint save) are regenerated deterministically.
      if (s.episode_index <= start_episode) record.sessions.push_back(s);
    }
  }
  // (Re)write the deterministic prefix, then append from there.
  write_run_record(rec_path, record);
  std::ofstream rec_out(rec_path, std::ios::app);
  if (!rec_out) throw LoadError("run record: cannot append to " + rec_path.string());

  const auto started_at = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t warmup = static_cast<std::size_t>(config.agent.batch_size);

  const auto session_done = [&]() {
    return opts.stop_after_sessions >= 0 &&
           static_cast<long>(record.sessions.size()) >= opts.stop_after_sessions;
  };

  std::vector<Transition> episode;
  episode.reserve(static_cast<std::size_t>(config.steps_per_episode));
  const auto guarded_train_step = [&](long ep) {
    if (agent.buffer.size() < warmup) return;
    try {
      agent.train_step();
    } catch (const NumericError&) {
      // Diagnostic snapshot of the diverged state, then abort the run.
      save_checkpoint(ckpt_path.string() + ".diverged",
                      {record.config_hash, seed, static_cast<std::uint64_t>(ep)}, agent,
                      env.rng());
      throw;
    }
  };
  for (long ep = start_episode; ep < config.episodes && !session_done(); ++ep) {
    Eigen::VectorXd obs = env.reset();
    agent.reset_noise();
    episode.clear();
    while (true) {
      const Eigen::VectorXd action = agent.select_action(obs, /*explore=*/true);
      StepResult res = env.step(action);
      Transition t;
      t.s = std::move(obs);
      t.a = action;
      t.s_next = res.observation;
      t.r = res.reward;
      t.terminal = res.success;  // truncation still bootstraps
      episode.push_back(t);
      agent.buffer.push(std::move(t));
      // One gradient update per environment step, interleaved with
      // collection as in the underlying actor-critic recipe.
      guarded_train_step(ep);
      obs = std::move(res.observation);
      if (res.success || res.truncated) break;
    }
    if (config.agent.her_enabled) {
      for (Transition& t : her_relabel(episode, config.env)) agent.buffer.push(std::move(t));
    }

    const long done = ep + 1;
    if (done % config.test_every == 0) {
      const long session_index = done / config.test_every;
      ReacherEnv test_env(config.arm, config.env, test_stream_seed(seed, session_index));
      const TestSessionRecord session =
          run_test_session(agent, test_env, config.test_episodes, done);
      record.sessions.push_back(session);
      rec_out << session_line(session) << '\n';
      rec_out.flush();
      if (!rec_out) throw LoadError("run record: append failed for " + rec_path.string());
      save_checkpoint(ckpt_path, {record.config_hash, seed, static_cast<std::uint64_t>(done)},
                      agent, env.rng());
      write_meta(meta_path(opts.out_dir, seed), seed, record.config_hash, done, started_at, t0);
      if (!opts.quiet) {
        std::cerr << "seed " << seed << " episode " << done << ": " << session.successes << "/"
                  << config.test_episodes << " goals, mean return " << session.mean_return
                  << "\n";
      }
    }
  }

  if (!session_done()) {
    // Completed all episodes; leave a final checkpoint even off a session
    // boundary so the policy is loadable afterwards.
    save_checkpoint(ckpt_path,
                    {record.config_hash, seed, static_cast<std::uint64_t>(config.episodes)}, agent,
                    env.rng());
    write_meta(meta_path(opts.out_dir, seed), seed, record.config_hash, config.episodes,
               started_at, t0);
  }
  return record;
}

std::vector<CurvePoint> aggregate_runs(const std::vector<RunRecord>& records) {
  if (records.empty()) return {};
  const std::size_t sessions = records.front().sessions.size();
  for (const RunRecord& r : records) {
    if (r.config_hash != records.front().config_hash) {
      throw ValidationError("aggregate: records have mismatched config hashes");
    }
    if (r.sessions.size() != sessions) {
      throw ValidationError("aggregate: records have mismatched session counts");
    }
  }

  const std::size_t n = records.size();
  std::vector<CurvePoint> curve(sessions);
  for (std::size_t s = 0; s < sessions; ++s) {
    const long episode_index = records.front().sessions[s].episode_index;
    double sum = 0.0;
    for (const RunRecord& r : records) {
      if (r.sessions[s].episode_index != episode_index) {
        throw ValidationError("aggregate: records have mismatched session schedules");
      }
      sum += r.sessions[s].successes;
    }
    const double mean = sum / static_cast<double>(n);
    double half_width = 0.0;
    if (n >= 2) {
      double ss = 0.0;
      for (const RunRecord& r : records) {
        const double d = r.sessions[s].successes - mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (sd > 0.0) {
        const boost::math::students_t_distribution<double> dist(static_cast<double>(n - 1));
        // Symmetric 65% interval: 0.825 quantile on each side.
        half_width = boost::math::quantile(dist, 0.825) * sd / std::sqrt(static_cast<double>(n));
      }
    }
    curve[s] = {episode_index, mean, mean - half_width, mean + half_width};
  }
  return curve;
}

}  // namespace reacherbench
