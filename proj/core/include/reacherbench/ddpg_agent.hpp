#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "reacherbench/mlp.hpp"
#include "reacherbench/optimizer.hpp"
#include "reacherbench/reacher_env.hpp"
#include "reacherbench/replay_buffer.hpp"
#include "reacherbench/rng.hpp"

namespace reacherbench {

enum class NoiseKind { Gaussian, OrnsteinUhlenbeck };

struct AgentConfig {
  double gamma = 0.98;
  std::size_t buffer_capacity = 1000000;
  int batch_size = 64;
  double exploration_rate = 0.01;  // per-joint noise std as a fraction of joint range
  double tau = 0.001;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  bool her_enabled = true;
  NoiseKind noise = NoiseKind::Gaussian;
  double ou_theta = 0.15;  // OrnsteinUhlenbeck only
  double ou_sigma = 0.2;

  void validate() const;
  nlohmann::json to_json() const;
  static AgentConfig from_json(const nlohmann::json& j);
};

struct TrainStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

/// Bellman regression targets: y_i = r_i + (1 - terminal_i) * gamma *
/// Q_t(s'_i, mu_t(s'_i)). Terminal transitions (absorbing successes) do not
/// bootstrap.
Eigen::VectorXd critic_target(const std::vector<const Transition*>& batch,
                              const NetworkParams& target_actor,
                              const NetworkParams& target_critic, double gamma);

/// Final-goal hindsight relabel: returns a copy of the episode whose goal
/// slots are rewritten with the episode's final end-effector position, whose
/// rewards are recomputed against that goal, and whose terminal flags are set
/// where the relabeled success condition holds. Observation layout follows
/// the environment: [theta, theta_dot, theta_ddot, goal - ee, goal].
std::vector<Transition> her_relabel(const std::vector<Transition>& episode,
                                    const EnvConfig& env_config);

/// Deterministic-policy-gradient learner over the reaching MDP: a bounded
/// actor, an action-value critic with the action injected at the second
/// hidden layer, target copies of both, Adam optimizers, and a uniform
/// replay buffer. Public state is exposed for checkpointing.
class DdpgAgent {
 public:
  DdpgAgent(int obs_dim, Eigen::VectorXd action_lo, Eigen::VectorXd action_hi, AgentConfig config,
            const std::vector<int>& hidden, std::uint64_t seed);

  /// Actor output; with explore, noise scaled by exploration_rate times the
  /// joint range is added and the result clamped to the joint limits. Without
  /// explore this is a pure function of (actor params, obs).
  Eigen::VectorXd select_action(const Eigen::VectorXd& obs, bool explore);

  /// Resets exploration noise state (Ornstein-Uhlenbeck); call between
  /// episodes. No-op for Gaussian noise.
  void reset_noise();

  /// One critic regression step, one policy-gradient actor step, one soft
  /// update of both targets, over a uniformly sampled batch. Throws
  /// ProtocolError on an empty buffer and NumericError on divergence.
  TrainStats train_step();

  int obs_dim() const { return obs_dim_; }
  int action_dim() const { return static_cast<int>(action_lo_.size()); }
  const Eigen::VectorXd& action_lo() const { return action_lo_; }
  const Eigen::VectorXd& action_hi() const { return action_hi_; }

  AgentConfig config;
  NetworkParams actor, critic, target_actor, target_critic;
  AdamState actor_opt, critic_opt;
  ReplayBuffer buffer;
  RandomStream rng;
  Eigen::VectorXd ou_state;

 private:
  int obs_dim_;
  Eigen::VectorXd action_lo_, action_hi_;
};

}  // namespace reacherbench
