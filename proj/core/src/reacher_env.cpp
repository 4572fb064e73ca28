#include "reacherbench/reacher_env.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "reacherbench/errors.hpp"

namespace reacherbench {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

RewardMode reward_mode_from_string(const std::string& s) {
  if (s == "dense") return RewardMode::Dense;
  if (s == "sparse") return RewardMode::Sparse;
  throw ParseError("reward_mode must be 'dense' or 'sparse', got '" + s + "'");
}

std::string to_string(RewardMode mode) {
  return mode == RewardMode::Dense ? "dense" : "sparse";
}

void EnvConfig::validate() const {
  if (!(epsilon > 0.0)) throw ValidationError("env config: epsilon must be > 0");
  if (max_steps < 1) throw ValidationError("env config: max_steps must be >= 1");
  if (!(dt > 0.0)) throw ValidationError("env config: dt must be > 0");
  if (!(omega_max > 0.0)) throw ValidationError("env config: omega_max must be > 0");
  if (n_active < 2) throw ValidationError("env config: n_active must be >= 2");
  if (start_theta && !start_theta->allFinite()) {
    throw ValidationError("env config: start_theta has non-finite entries");
  }
}

nlohmann::json EnvConfig::to_json() const {
  nlohmann::json j{{"region", region.to_json()},
                   {"n_active", n_active},
                   {"epsilon", epsilon},
                   {"max_steps", max_steps},
                   {"dt", dt},
                   {"omega_max", omega_max},
                   {"reward_mode", to_string(reward_mode)}};
  if (start_theta) {
    j["start_theta"] = std::vector<double>(start_theta->begin(), start_theta->end());
  }
  return j;
}

EnvConfig EnvConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("env config: expected a JSON object");
  EnvConfig cfg;
  if (!j.contains("region")) throw ParseError("env config: missing field 'region'");
  cfg.region = GoalRegion::from_json(j.at("region"));
  if (!j.contains("n_active")) throw ParseError("env config: missing field 'n_active'");
  cfg.n_active = j.at("n_active").get<int>();
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.omega_max = j.value("omega_max", cfg.omega_max);
  if (j.contains("reward_mode")) {
    cfg.reward_mode = reward_mode_from_string(j.at("reward_mode").get<std::string>());
  }
  if (j.contains("start_theta")) {
    const auto vals = j.at("start_theta").get<std::vector<double>>();
    JointVector theta(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) theta[static_cast<Eigen::Index>(i)] = vals[i];
    cfg.start_theta = theta;
  }
  cfg.validate();
  return cfg;
}

JointVector EnvConfig::resolved_start_theta(const ArmModel& model) const {
  const int total = model.total_joints();
  if (start_theta) {
    if (start_theta->size() != total) {
      throw ValidationError("env config: start_theta has " + std::to_string(start_theta->size()) +
                            " entries for a " + std::to_string(total) + "-joint arm");
    }
    return *start_theta;
  }
  JointVector theta = JointVector::Zero(total);
  if (region.kind() != GoalRegion::Kind::Unconstrained) {
    // Elbow-up pose used with constrained regions; keeps the arm clear of the
    // region boundary at episode start.
    const double pose[] = {0.0, kPi / 2.0, kPi / 4.0};
    for (int i = 0; i < total && i < 3; ++i) theta[i] = pose[i];
  }
  return theta;
}

double reward(const Eigen::Vector3d& ee, const Eigen::Vector3d& goal, const JointVector& action,
              double epsilon, RewardMode mode) {
  const double dist = (ee - goal).norm();
  const double bonus = dist <= epsilon ? 100.0 : 0.0;
  if (mode == RewardMode::Sparse) return bonus;
  return -dist - action.squaredNorm() + bonus;
}

JointState integrate_joints(const JointState& state, const JointVector& command, double dt,
                            double omega_max) {
  if (command.size() > state.theta.size()) {
    throw DimensionError("integrate_joints: command longer than the joint state");
  }
  const double max_delta = omega_max * dt;
  JointState next;
  next.theta = state.theta;
  next.theta_dot = JointVector::Zero(state.theta.size());
  next.theta_ddot = JointVector::Zero(state.theta.size());
  for (Eigen::Index i = 0; i < command.size(); ++i) {
    const double delta = std::clamp(command[i] - state.theta[i], -max_delta, max_delta);
    next.theta[i] = state.theta[i] + delta;
    next.theta_dot[i] = delta / dt;
    next.theta_ddot[i] = (next.theta_dot[i] - state.theta_dot[i]) / dt;
  }
  return next;
}

Goal sample_goal(const ArmModel& model, const GoalRegion& region, const JointVector& start_theta,
                 RandomStream& rng, int rejection_cap) {
  if (start_theta.size() != model.total_joints()) {
    throw DimensionError("sample_goal: start_theta length mismatch");
  }
  const int n = model.active_joints();
  JointVector candidate = start_theta;
  for (int rejects = 0; rejects <= rejection_cap; ++rejects) {
    for (int i = 0; i < n; ++i) {
      const JointLimit& lim = model.limit(i);
      candidate[i] = rng.uniform(lim.lo, lim.hi);
    }
    const Eigen::Vector3d p = model.forward_kinematics(candidate);
    if (region.contains(p)) return Goal{p, candidate};
  }
  throw InfeasibleRegionError("goal sampling: exceeded " + std::to_string(rejection_cap) +
                              " rejections; region may not intersect the reachable workspace");
}

ReacherEnv::ReacherEnv(const ArmModel& model, EnvConfig config, std::uint64_t seed)
    : model_(model.restrict_active(config.n_active)),
      config_(std::move(config)),
      rng_(seed) {
  config_.validate();
  // Resolve once so later resets cannot be affected by config mutation.
  config_.start_theta = config_.resolved_start_theta(model_);
}

void ReacherEnv::start_episode(Goal goal) {
  const Eigen::Index total = model_.total_joints();
  state_.theta = *config_.start_theta;
  state_.theta_dot = JointVector::Zero(total);
  state_.theta_ddot = JointVector::Zero(total);
  goal_ = std::move(goal);
  step_count_ = 0;
  done_ = false;
}

Eigen::VectorXd ReacherEnv::reset() {
  start_episode(sample_goal(model_, config_.region, *config_.start_theta, rng_));
  return compose_observation();
}

Eigen::VectorXd ReacherEnv::reset_with_goal(const Goal& goal) {
  if (!config_.region.contains(goal.position)) {
    throw ValidationError("reset_with_goal: goal lies outside the configured region");
  }
  start_episode(goal);
  return compose_observation();
}

StepResult ReacherEnv::step(const JointVector& action) {
  if (done_) throw ProtocolError("step: episode already ended; call reset first");
  if (action.size() != config_.n_active) {
    throw DimensionError("step: action has " + std::to_string(action.size()) + " entries, need " +
                         std::to_string(config_.n_active));
  }
  JointVector clamped(action.size());
  for (Eigen::Index i = 0; i < action.size(); ++i) {
    const JointLimit& lim = model_.limit(static_cast<int>(i));
    clamped[i] = std::clamp(action[i], lim.lo, lim.hi);
  }

  state_ = integrate_joints(state_, clamped, config_.dt, config_.omega_max);
  ++step_count_;

  const Eigen::Vector3d ee = model_.forward_kinematics(state_.theta);
  StepResult result;
  result.success = (ee - goal_.position).norm() <= config_.epsilon;
  result.truncated = !result.success && step_count_ >= config_.max_steps;
  result.reward = reward(ee, goal_.position, clamped, config_.epsilon, config_.reward_mode);
  result.observation = compose_observation();
  done_ = result.success || result.truncated;
  return result;
}

Eigen::VectorXd ReacherEnv::compose_observation() const {
  const int n = config_.n_active;
  Eigen::VectorXd obs(3 * n + 6);
  obs.segment(0, n) = state_.theta.head(n);
  obs.segment(n, n) = state_.theta_dot.head(n);
  obs.segment(2 * n, n) = state_.theta_ddot.head(n);
  const Eigen::Vector3d ee = model_.forward_kinematics(state_.theta);
  obs.segment(3 * n, 3) = goal_.position - ee;
  obs.segment(3 * n + 3, 3) = goal_.position;
  return obs;
}

}  // namespace reacherbench
