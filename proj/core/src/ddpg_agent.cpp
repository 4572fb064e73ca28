#include "reacherbench/ddpg_agent.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "reacherbench/errors.hpp"

namespace reacherbench {

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("agent config: need 0 < gamma < 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("agent config: need 0 < tau <= 1");
  if (buffer_capacity == 0) throw ValidationError("agent config: buffer_capacity must be >= 1");
  if (batch_size < 1) throw ValidationError("agent config: batch_size must be >= 1");
  if (static_cast<std::size_t>(batch_size) > buffer_capacity) {
    throw ValidationError("agent config: batch_size exceeds buffer_capacity");
  }
  if (exploration_rate < 0.0) throw ValidationError("agent config: exploration_rate must be >= 0");
  if (!(actor_lr >= 0.0 && critic_lr >= 0.0)) {
    throw ValidationError("agent config: learning rates must be >= 0");
  }
}

nlohmann::json AgentConfig::to_json() const {
  return {{"gamma", gamma},
          {"buffer_capacity", buffer_capacity},
          {"batch_size", batch_size},
          {"exploration_rate", exploration_rate},
          {"tau", tau},
          {"actor_lr", actor_lr},
          {"critic_lr", critic_lr},
          {"her_enabled", her_enabled},
          {"noise", noise == NoiseKind::Gaussian ? "gaussian" : "ou"},
          {"ou_theta", ou_theta},
          {"ou_sigma", ou_sigma}};
}

AgentConfig AgentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("agent config: expected a JSON object");
  AgentConfig cfg;
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.buffer_capacity = j.value("buffer_capacity", cfg.buffer_capacity);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.exploration_rate = j.value("exploration_rate", cfg.exploration_rate);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.actor_lr = j.value("actor_lr", cfg.actor_lr);
  cfg.critic_lr = j.value("critic_lr", cfg.critic_lr);
  cfg.her_enabled = j.value("her_enabled", cfg.her_enabled);
  if (j.contains("noise")) {
    const std::string kind = j.at("noise").get<std::string>();
    if (kind == "gaussian") {
      cfg.noise = NoiseKind::Gaussian;
    } else if (kind == "ou") {
      cfg.noise = NoiseKind::OrnsteinUhlenbeck;
    } else {
      throw ParseError("agent config: noise must be 'gaussian' or 'ou', got '" + kind + "'");
    }
  }
  cfg.ou_theta = j.value("ou_theta", cfg.ou_theta);
  cfg.ou_sigma = j.value("ou_sigma", cfg.ou_sigma);
  cfg.validate();
  return cfg;
}

namespace {

// Column-matrix views over a sampled batch.
struct BatchMatrices {
  Eigen::MatrixXd s, a, s_next;
  Eigen::VectorXd r;
  Eigen::VectorXd not_terminal;
};

BatchMatrices gather(const std::vector<const Transition*>& batch) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index obs = batch.front()->s.size();
  const Eigen::Index act = batch.front()->a.size();
  BatchMatrices m;
  m.s.resize(obs, n);
  m.a.resize(act, n);
  m.s_next.resize(obs, n);
  m.r.resize(n);
  m.not_terminal.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = *batch[static_cast<std::size_t>(i)];
    m.s.col(i) = t.s;
    m.a.col(i) = t.a;
    m.s_next.col(i) = t.s_next;
    m.r[i] = t.r;
    m.not_terminal[i] = t.terminal ? 0.0 : 1.0;
  }
  return m;
}

}  // namespace

Eigen::VectorXd critic_target(const std::vector<const Transition*>& batch,
                              const NetworkParams& target_actor,
                              const NetworkParams& target_critic, double gamma) {
  if (batch.empty()) throw ProtocolError("critic_target: empty batch");
  const BatchMatrices m = gather(batch);
  ForwardCache cache;
  const Eigen::MatrixXd a_next = mlp_forward(target_actor, m.s_next, Eigen::MatrixXd(), cache);
  const Eigen::MatrixXd q_next = mlp_forward(target_critic, m.s_next, a_next, cache);
  return m.r.array() + m.not_terminal.array() * gamma * q_next.row(0).transpose().array();
}

std::vector<Transition> her_relabel(const std::vector<Transition>& episode,
                                    const EnvConfig& env_config) {
  if (episode.empty()) throw ProtocolError("her_relabel: empty episode");
  const int n = env_config.n_active;
  const Eigen::Index obs_len = 3 * n + 6;
  for (const Transition& t : episode) {
    if (t.s.size() != obs_len || t.s_next.size() != obs_len) {
      throw ProtocolError("her_relabel: observation length does not match 3n+6 layout");
    }
  }

  // ee is recoverable from any observation: goal - (goal - ee).
  const auto ee_of = [n](const Eigen::VectorXd& obs) -> Eigen::Vector3d {
    return obs.segment(3 * n + 3, 3) - obs.segment(3 * n, 3);
  };
  const auto rewrite = [n](Eigen::VectorXd& obs, const Eigen::Vector3d& goal,
                           const Eigen::Vector3d& ee) {
    obs.segment(3 * n, 3) = goal - ee;
    obs.segment(3 * n + 3, 3) = goal;
  };

  const Eigen::Vector3d new_goal = ee_of(episode.back().s_next);
  std::vector<Transition> relabeled = episode;
  for (Transition& t : relabeled) {
    const Eigen::Vector3d ee_s = ee_of(t.s);
    const Eigen::Vector3d ee_next = ee_of(t.s_next);
    rewrite(t.s, new_goal, ee_s);
    rewrite(t.s_next, new_goal, ee_next);
    t.r = reward(ee_next, new_goal, t.a, env_config.epsilon, env_config.reward_mode);
    t.terminal = (ee_next - new_goal).norm() <= env_config.epsilon;
  }
  return relabeled;
}

DdpgAgent::DdpgAgent(int obs_dim, Eigen::VectorXd action_lo, Eigen::VectorXd action_hi,
                     AgentConfig config_in, const std::vector<int>& hidden, std::uint64_t seed)
    : config(std::move(config_in)),
      buffer(config.buffer_capacity),
      rng(seed),
      obs_dim_(obs_dim),
      action_lo_(std::move(action_lo)),
      action_hi_(std::move(action_hi)) {
  config.validate();
  if (obs_dim_ < 1) throw ValidationError("agent: obs_dim must be >= 1");
  if (action_lo_.size() != action_hi_.size() || action_lo_.size() == 0) {
    throw ValidationError("agent: action bounds must be nonempty and equal length");
  }
  if (!((action_lo_.array() < action_hi_.array()).all())) {
    throw ValidationError("agent: action_lo must be < action_hi componentwise");
  }
  if (hidden.empty()) throw ValidationError("agent: need at least one hidden layer");

  const int act = action_dim();
  MlpSpec actor_spec;
  actor_spec.sizes.push_back(obs_dim_);
  actor_spec.sizes.insert(actor_spec.sizes.end(), hidden.begin(), hidden.end());
  actor_spec.sizes.push_back(act);
  actor_spec.output = OutputActivation::ScaledTanh;
  actor_spec.out_lo = action_lo_;
  actor_spec.out_hi = action_hi_;

  MlpSpec critic_spec;
  critic_spec.sizes.push_back(obs_dim_);
  critic_spec.sizes.insert(critic_spec.sizes.end(), hidden.begin(), hidden.end());
  critic_spec.sizes.push_back(1);
  critic_spec.output = OutputActivation::Identity;
  critic_spec.aux_dim = act;
  critic_spec.inject_layer = hidden.size() > 1 ? 1 : 0;

  actor = init_params(actor_spec, rng);
  critic = init_params(critic_spec, rng);
  target_actor = actor;  // targets start as exact copies
  target_critic = critic;
  actor_opt = AdamState::zeros_like(actor);
  critic_opt = AdamState::zeros_like(critic);
  ou_state = Eigen::VectorXd::Zero(act);
}

Eigen::VectorXd DdpgAgent::select_action(const Eigen::VectorXd& obs, bool explore) {
  if (obs.size() != obs_dim_) {
    throw DimensionError("select_action: observation has " + std::to_string(obs.size()) +
                         " entries, actor expects " + std::to_string(obs_dim_));
  }
  Eigen::VectorXd a = mlp_forward(actor, obs);
  if (!explore) return a;

  if (config.noise == NoiseKind::Gaussian) {
    const Eigen::ArrayXd scale = config.exploration_rate * (action_hi_ - action_lo_).array();
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] += scale[i] * rng.gaussian();
  } else {
    // The OU process lives in normalized action space (the usual convention
    // for this noise in deterministic actor-critic setups) and is mapped
    // through the same half-range scaling the actor output uses.
    const Eigen::ArrayXd half = 0.5 * (action_hi_ - action_lo_).array();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      ou_state[i] += -config.ou_theta * ou_state[i] + config.ou_sigma * rng.gaussian();
      a[i] += half[i] * ou_state[i];
    }
  }
  return a.cwiseMax(action_lo_).cwiseMin(action_hi_);
}

void DdpgAgent::reset_noise() { ou_state.setZero(); }

TrainStats DdpgAgent::train_step() {
  const std::size_t n = static_cast<std::size_t>(config.batch_size);
  const std::vector<std::size_t> idx = buffer.sample_indices(n, rng);
  std::vector<const Transition*> batch(n);
  for (std::size_t i = 0; i < n; ++i) batch[i] = &buffer.at(idx[i]);

  const Eigen::VectorXd y = critic_target(batch, target_actor, target_critic, config.gamma);
  const BatchMatrices m = gather(batch);
  const double inv_n = 1.0 / static_cast<double>(n);

  // Critic regression toward y.
  ForwardCache critic_cache;
  const Eigen::MatrixXd q = mlp_forward(critic, m.s, m.a, critic_cache);
  const Eigen::VectorXd err = q.row(0).transpose() - y;
  TrainStats stats;
  stats.critic_loss = err.squaredNorm() * inv_n;
  if (!std::isfinite(stats.critic_loss)) {
    throw NumericError("train_step: critic loss is not finite");
  }
  const Eigen::MatrixXd dq = (2.0 * inv_n) * err.transpose();
  const BackwardResult critic_back = mlp_backward(critic, critic_cache, dq);
  adam_step(critic_opt, critic, critic_back.grads, config.critic_lr);

  // Actor ascends mean Q(s, actor(s)); dQ/da flows back through the critic.
  ForwardCache actor_cache;
  const Eigen::MatrixXd a_pi = mlp_forward(actor, m.s, Eigen::MatrixXd(), actor_cache);
  ForwardCache q_cache;
  const Eigen::MatrixXd q_pi = mlp_forward(critic, m.s, a_pi, q_cache);
  stats.actor_objective = q_pi.row(0).sum() * inv_n;
  if (!std::isfinite(stats.actor_objective)) {
    throw NumericError("train_step: actor objective is not finite");
  }
  const Eigen::MatrixXd dq_pi = Eigen::MatrixXd::Constant(1, static_cast<Eigen::Index>(n), inv_n);
  const BackwardResult q_back = mlp_backward(critic, q_cache, dq_pi);
  const BackwardResult actor_back = mlp_backward(actor, actor_cache, q_back.aux_grad);
  ParamGrads ascent = actor_back.grads;  // Adam minimizes; flip for ascent
  for (auto& w : ascent.W) w = -w;
  for (auto& v : ascent.b) v = -v;
  adam_step(actor_opt, actor, ascent, config.actor_lr);

  soft_update(target_actor, actor, config.tau);
  soft_update(target_critic, critic, config.tau);
  return stats;
}

}  // namespace reacherbench
