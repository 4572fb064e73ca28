#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <optional>

#include "reacherbench/arm_model.hpp"
#include "reacherbench/goal_region.hpp"
#include "reacherbench/rng.hpp"

namespace reacherbench {

enum class RewardMode { Dense, Sparse };

RewardMode reward_mode_from_string(const std::string& s);
std::string to_string(RewardMode mode);

/// Full-length joint kinematic state; the three vectors always share a length.
struct JointState {
  JointVector theta;
  JointVector theta_dot;
  JointVector theta_ddot;
};

/// A sampled goal plus the joint vector that generated it, so
/// fk(generator_theta) == position holds exactly by construction.
struct Goal {
  Eigen::Vector3d position;
  JointVector generator_theta;
};

/// Episode parameters. start_theta is over all joints; when absent the
/// default depends on the region: zeros for unconstrained, an elbow-up pose
/// (0, pi/2, pi/4, 0, ...) otherwise.
struct EnvConfig {
  GoalRegion region;
  int n_active = 6;
  double epsilon = 0.1;
  int max_steps = 100;
  double dt = 0.02;
  double omega_max = 3.14159265358979323846;
  RewardMode reward_mode = RewardMode::Dense;
  std::optional<JointVector> start_theta;

  /// Throws ValidationError when a field is out of range.
  void validate() const;

  nlohmann::json to_json() const;
  static EnvConfig from_json(const nlohmann::json& j);

  /// The start pose this config implies for the given arm.
  JointVector resolved_start_theta(const ArmModel& model) const;
};

struct StepResult {
  Eigen::VectorXd observation;
  double reward = 0.0;
  bool success = false;
  bool truncated = false;
};

/// Distance-shaped reward with an action-magnitude penalty and a +100 bonus
/// inside the success ball; sparse mode keeps only the bonus term.
double reward(const Eigen::Vector3d& ee, const Eigen::Vector3d& goal, const JointVector& action,
              double epsilon, RewardMode mode);

/// Rate-limited first-order tracking toward the commanded angles: each active
/// joint moves by at most omega_max*dt per call. Joints beyond the command
/// length are frozen with zero rates. Velocity and acceleration are the
/// resulting finite differences over dt.
JointState integrate_joints(const JointState& state, const JointVector& command, double dt,
                            double omega_max);

/// Rejection-samples a goal: active joints drawn uniformly within limits,
/// inactive joints held at start_theta, candidates rejected until the
/// end-effector position lands in the region. Throws InfeasibleRegionError
/// after rejection_cap rejected candidates.
Goal sample_goal(const ArmModel& model, const GoalRegion& region, const JointVector& start_theta,
                 RandomStream& rng, int rejection_cap = 100000);

/// Goal-conditioned reaching MDP on a kinematic arm. Observations are
/// [theta_active, theta_dot_active, theta_ddot_active, goal - ee, goal],
/// length 3*n_active + 6. Actions are absolute joint-angle commands for the
/// active joints, clamped to limits. Episodes end on success (end-effector
/// within epsilon of the goal) or after max_steps.
class ReacherEnv {
 public:
  ReacherEnv(const ArmModel& model, EnvConfig config, std::uint64_t seed);

  /// Start a fresh episode with a newly sampled goal.
  Eigen::VectorXd reset();
  /// Start a fresh episode with a caller-chosen goal (must lie in the region).
  Eigen::VectorXd reset_with_goal(const Goal& goal);
  /// Throws ProtocolError when the episode has already ended.
  StepResult step(const JointVector& action);

  int obs_dim() const { return 3 * config_.n_active + 6; }
  int action_dim() const { return config_.n_active; }
  const ArmModel& model() const { return model_; }
  const EnvConfig& config() const { return config_; }
  const Goal& goal() const { return goal_; }
  const JointState& joint_state() const { return state_; }
  Eigen::Vector3d end_effector() const { return model_.forward_kinematics(state_.theta); }
  int steps_taken() const { return step_count_; }
  bool episode_done() const { return done_; }
  RandomStream& rng() { return rng_; }

 private:
  Eigen::VectorXd compose_observation() const;
  void start_episode(Goal goal);

  ArmModel model_;
  EnvConfig config_;
  RandomStream rng_;
  JointState state_;
  Goal goal_;
  int step_count_ = 0;
  bool done_ = true;  // step() before the first reset() is a protocol error
};

}  // namespace reacherbench
