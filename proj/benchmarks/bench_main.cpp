#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "reacherbench/arm_model.hpp"
#include "reacherbench/ddpg_agent.hpp"
#include "reacherbench/mlp.hpp"
#include "reacherbench/reacher_env.hpp"
#include "reacherbench/rng.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

using namespace reacherbench;

void BM_ForwardKinematics(benchmark::State& state) {
  const ArmModel ur5 = ur5_model();
  RandomStream rng(1);
  JointVector theta(6);
  for (int j = 0; j < 6; ++j) theta[j] = rng.uniform(ur5.limit(j).lo, ur5.limit(j).hi);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ur5.forward_kinematics(theta));
    theta[0] += 1e-9;  // defeat caching without changing the cost
  }
}
BENCHMARK(BM_ForwardKinematics);

void BM_EnvStep(benchmark::State& state) {
  EnvConfig cfg;
  cfg.region = GoalRegion::unconstrained();
  cfg.n_active = static_cast<int>(state.range(0));
  ReacherEnv env(ur5_model(), cfg, 2);
  env.reset();
  const JointVector cmd = JointVector::Constant(cfg.n_active, 0.1);
  for (auto _ : state) {
    if (env.episode_done()) env.reset();
    benchmark::DoNotOptimize(env.step(cmd));
  }
}
BENCHMARK(BM_EnvStep)->Arg(2)->Arg(6);

MlpSpec critic_spec(int obs, int act, const std::vector<int>& hidden) {
  MlpSpec spec;
  spec.sizes.push_back(obs);
  spec.sizes.insert(spec.sizes.end(), hidden.begin(), hidden.end());
  spec.sizes.push_back(1);
  spec.aux_dim = act;
  spec.inject_layer = hidden.size() > 1 ? 1 : 0;
  return spec;
}

void BM_MlpForwardBatch(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  RandomStream rng(3);
  const NetworkParams params = init_params(critic_spec(24, 6, {400, 300}), rng);
  const Eigen::MatrixXd input = Eigen::MatrixXd::Random(24, batch);
  const Eigen::MatrixXd aux = Eigen::MatrixXd::Random(6, batch);
  ForwardCache cache;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_forward(params, input, aux, cache));
  }
}
BENCHMARK(BM_MlpForwardBatch)->Arg(1)->Arg(64);

void BM_MlpBackwardBatch(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  RandomStream rng(4);
  const NetworkParams params = init_params(critic_spec(24, 6, {400, 300}), rng);
  const Eigen::MatrixXd input = Eigen::MatrixXd::Random(24, batch);
  const Eigen::MatrixXd aux = Eigen::MatrixXd::Random(6, batch);
  ForwardCache cache;
  mlp_forward(params, input, aux, cache);
  const Eigen::MatrixXd output_grad = Eigen::MatrixXd::Ones(1, batch);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_backward(params, cache, output_grad));
  }
}
BENCHMARK(BM_MlpBackwardBatch)->Arg(1)->Arg(64);

void BM_TrainStep(benchmark::State& state) {
  AgentConfig cfg;
  cfg.buffer_capacity = 100000;
  const std::vector<int> hidden =
      state.range(0) == 0 ? std::vector<int>{64, 64} : std::vector<int>{400, 300};
  DdpgAgent agent(12, Eigen::VectorXd::Constant(2, -kPi), Eigen::VectorXd::Constant(2, kPi), cfg,
                  hidden, 5);
  RandomStream rng(6);
  for (int i = 0; i < 1000; ++i) {
    Transition t;
    t.s = Eigen::VectorXd::NullaryExpr(12, [&](Eigen::Index) { return rng.uniform(-1.0, 1.0); });
    t.a = Eigen::VectorXd::NullaryExpr(2, [&](Eigen::Index) { return rng.uniform(-kPi, kPi); });
    t.s_next = t.s;
    t.r = rng.uniform(-1.0, 0.0);
    t.terminal = false;
    agent.buffer.push(std::move(t));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(agent.train_step());
  }
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
