#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "reacherbench/checkpoint.hpp"
#include "reacherbench/errors.hpp"

using namespace reacherbench;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("rb_ckpt_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

AgentConfig tiny_config() {
  AgentConfig cfg;
  cfg.buffer_capacity = 64;
  cfg.batch_size = 8;
  return cfg;
}

DdpgAgent make_agent(std::uint64_t seed, const AgentConfig& cfg = tiny_config(),
                     const std::vector<int>& hidden = {8, 8}) {
  return DdpgAgent(12, Eigen::VectorXd::Constant(2, -kPi), Eigen::VectorXd::Constant(2, kPi), cfg,
                   hidden, seed);
}

void fill_and_train(DdpgAgent& agent, int transitions, int steps) {
  for (int i = 0; i < transitions; ++i) {
    Transition t;
    t.s = Eigen::VectorXd::Constant(12, 0.01 * i);
    t.a = Eigen::VectorXd::Constant(2, -0.02 * i);
    t.s_next = Eigen::VectorXd::Constant(12, 0.01 * i + 0.005);
    t.r = -0.1 * i;
    t.terminal = (i % 7 == 0);
    agent.buffer.push(std::move(t));
  }
  for (int i = 0; i < steps; ++i) agent.train_step();
}

bool networks_equal(const NetworkParams& a, const NetworkParams& b) {
  if (!(a.spec == b.spec)) return false;
  for (std::size_t l = 0; l < a.W.size(); ++l) {
    if (a.W[l] != b.W[l] || a.b[l] != b.b[l]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("a checkpoint restores the full training state bitwise") {
  TempDir dir;
  const fs::path path = dir.path / "state.ckpt";

  DdpgAgent agent = make_agent(42);
  RandomStream env_rng(7);
  env_rng.uniform();  // advance mid-stream
  fill_and_train(agent, 40, 25);
  agent.reset_noise();
  const CheckpointHeader header{0x1234abcdu, 42, 300};
  save_checkpoint(path, header, agent, env_rng);

  DdpgAgent loaded = make_agent(999);  // different seed; everything overwritten
  RandomStream loaded_env(1);
  const CheckpointHeader back = load_checkpoint(path, loaded, loaded_env);

  CHECK(back.config_hash == header.config_hash);
  CHECK(back.seed == header.seed);
  CHECK(back.episodes_done == header.episodes_done);

  CHECK(networks_equal(loaded.actor, agent.actor));
  CHECK(networks_equal(loaded.critic, agent.critic));
  CHECK(networks_equal(loaded.target_actor, agent.target_actor));
  CHECK(networks_equal(loaded.target_critic, agent.target_critic));
  CHECK(loaded.actor_opt.step_count == agent.actor_opt.step_count);
  CHECK(loaded.critic_opt.step_count == agent.critic_opt.step_count);
  for (std::size_t l = 0; l < agent.actor_opt.mW.size(); ++l) {
    CHECK(loaded.actor_opt.mW[l] == agent.actor_opt.mW[l]);
    CHECK(loaded.critic_opt.vW[l] == agent.critic_opt.vW[l]);
  }
  CHECK(loaded.ou_state == agent.ou_state);

  REQUIRE(loaded.buffer.size() == agent.buffer.size());
  CHECK(loaded.buffer.write_index() == agent.buffer.write_index());
  for (std::size_t i = 0; i < agent.buffer.size(); ++i) {
    CHECK(loaded.buffer.at(i).s == agent.buffer.at(i).s);
    CHECK(loaded.buffer.at(i).r == agent.buffer.at(i).r);
    CHECK(loaded.buffer.at(i).terminal == agent.buffer.at(i).terminal);
  }

  // the random streams continue in lockstep
  CHECK(loaded_env == env_rng);
  CHECK(loaded_env.next_u64() == env_rng.next_u64());
  CHECK(loaded.rng.next_u64() == agent.rng.next_u64());

  // and so does training
  const TrainStats sa = agent.train_step();
  const TrainStats sb = loaded.train_step();
  CHECK(sa.critic_loss == sb.critic_loss);
  CHECK(sa.actor_objective == sb.actor_objective);
  CHECK(networks_equal(loaded.actor, agent.actor));
}

TEST_CASE("peek reads the header without an agent") {
  TempDir dir;
  const fs::path path = dir.path / "peek.ckpt";
  DdpgAgent agent = make_agent(1);
  RandomStream env_rng(2);
  save_checkpoint(path, {77, 5, 1200}, agent, env_rng);
  const CheckpointHeader h = peek_checkpoint(path);
  CHECK(h.config_hash == 77);
  CHECK(h.seed == 5);
  CHECK(h.episodes_done == 1200);
}

TEST_CASE("loading into a mismatched topology fails cleanly") {
  TempDir dir;
  const fs::path path = dir.path / "shape.ckpt";
  DdpgAgent agent = make_agent(3);
  RandomStream env_rng(4);
  save_checkpoint(path, {1, 3, 10}, agent, env_rng);

  DdpgAgent wider = make_agent(3, tiny_config(), {16, 8});
  const NetworkParams before = wider.actor;
  CHECK_THROWS_AS(load_checkpoint(path, wider, env_rng), LoadError);
  // the reject happens before any state is overwritten
  CHECK(networks_equal(wider.actor, before));
}

TEST_CASE("corrupted files are rejected") {
  TempDir dir;
  const fs::path path = dir.path / "corrupt.ckpt";
  DdpgAgent agent = make_agent(8);
  RandomStream env_rng(9);
  fill_and_train(agent, 20, 10);
  save_checkpoint(path, {2, 8, 50}, agent, env_rng);

  SUBCASE("missing file") {
    DdpgAgent fresh = make_agent(8);
    CHECK_THROWS_AS(load_checkpoint(dir.path / "absent.ckpt", fresh, env_rng), LoadError);
    CHECK_THROWS_AS(peek_checkpoint(dir.path / "absent.ckpt"), LoadError);
  }
  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XX", 2);
    f.close();
    DdpgAgent fresh = make_agent(8);
    CHECK_THROWS_AS(load_checkpoint(path, fresh, env_rng), LoadError);
  }
  SUBCASE("truncation") {
    const auto full = fs::file_size(path);
    fs::resize_file(path, full / 2);
    DdpgAgent fresh = make_agent(8);
    CHECK_THROWS_AS(load_checkpoint(path, fresh, env_rng), LoadError);
  }
}

TEST_CASE("saving replaces the destination atomically") {
  TempDir dir;
  const fs::path path = dir.path / "atomic.ckpt";
  DdpgAgent agent = make_agent(11);
  RandomStream env_rng(12);
  save_checkpoint(path, {1, 11, 1}, agent, env_rng);
  save_checkpoint(path, {1, 11, 2}, agent, env_rng);  // overwrite in place
  CHECK(peek_checkpoint(path).episodes_done == 2);
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}
