#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "reacherbench/errors.hpp"
#include "reacherbench/reacher_env.hpp"

using namespace reacherbench;

namespace {

constexpr double kPi = 3.14159265358979323846;

EnvConfig basic_config(GoalRegion region, int n_active) {
  EnvConfig cfg;
  cfg.region = std::move(region);
  cfg.n_active = n_active;
  return cfg;
}

}  // namespace

TEST_CASE("dense reward matches the shaped formula") {
  const Eigen::Vector3d goal(0.5, 0.0, 0.3);
  JointVector zero_action = JointVector::Zero(3);

  CHECK(reward(goal, goal, zero_action, 0.1, RewardMode::Dense) == 100.0);

  // distance 0.5, squared action norm 0.25 -> -0.75
  const Eigen::Vector3d ee1 = goal + Eigen::Vector3d(0.5, 0.0, 0.0);
  JointVector a(2);
  a << 0.5, 0.0;
  CHECK(reward(ee1, goal, a, 0.1, RewardMode::Dense) == doctest::Approx(-0.75).epsilon(1e-12));

  // inside the ball the distance penalty remains
  const Eigen::Vector3d ee2 = goal + Eigen::Vector3d(0.05, 0.0, 0.0);
  CHECK(reward(ee2, goal, zero_action, 0.1, RewardMode::Dense) ==
        doctest::Approx(99.95).epsilon(1e-12));
}

TEST_CASE("sparse reward is exactly 0 or 100") {
  const Eigen::Vector3d goal(0.5, 0.0, 0.3);
  JointVector a(2);
  a << 0.4, -0.2;
  CHECK(reward(goal + Eigen::Vector3d(0.2, 0, 0), goal, a, 0.1, RewardMode::Sparse) == 0.0);
  CHECK(reward(goal + Eigen::Vector3d(0.05, 0, 0), goal, a, 0.1, RewardMode::Sparse) == 100.0);
}

TEST_CASE("integrate_joints tracks with a rate limit") {
  JointState s;
  s.theta = JointVector::Zero(3);
  s.theta_dot = JointVector::Zero(3);
  s.theta_ddot = JointVector::Zero(3);

  SUBCASE("command at current angles is a fixed point") {
    const JointState next = integrate_joints(s, JointVector::Zero(3), 0.02, kPi);
    CHECK(next.theta == s.theta);
    CHECK(next.theta_dot.isZero(0.0));
  }

  SUBCASE("distant command saturates at omega_max*dt") {
    JointVector cmd(3);
    cmd << 1.0, -1.0, 0.0;
    const JointState next = integrate_joints(s, cmd, 0.02, kPi);
    CHECK(next.theta[0] == doctest::Approx(kPi * 0.02).epsilon(1e-15));
    CHECK(next.theta[1] == doctest::Approx(-kPi * 0.02).epsilon(1e-15));
    CHECK(next.theta[2] == 0.0);
    CHECK(next.theta_dot[0] == doctest::Approx(kPi).epsilon(1e-15));
  }

  SUBCASE("close command is reached exactly with the implied rate") {
    JointVector cmd(3);
    cmd << 0.01, 0.0, 0.0;
    const JointState next = integrate_joints(s, cmd, 0.02, kPi);
    CHECK(next.theta[0] == 0.01);
    CHECK(next.theta_dot[0] == doctest::Approx(0.5).epsilon(1e-15));
  }

  SUBCASE("joints beyond the command stay frozen with zero rates") {
    s.theta << 0.2, 0.3, 0.4;
    s.theta_dot << 1.0, 1.0, 1.0;
    JointVector cmd(2);
    cmd << 0.2, 0.3;
    const JointState next = integrate_joints(s, cmd, 0.02, kPi);
    CHECK(next.theta[2] == 0.4);
    CHECK(next.theta_dot[2] == 0.0);
    CHECK(next.theta_ddot[2] == 0.0);
  }
}

TEST_CASE("goal sampling satisfies region and exact-fk invariants") {
  const ArmModel ur5 = ur5_model().restrict_active(3);
  const JointVector start = JointVector::Zero(6);
  RandomStream rng(99);

  SUBCASE("unconstrained accepts the first candidate") {
    RandomStream probe(99);  // same stream; predict the draws
    JointVector expected = start;
    for (int j = 0; j < 3; ++j) {
      expected[j] = probe.uniform(ur5.limit(j).lo, ur5.limit(j).hi);
    }
    const Goal g = sample_goal(ur5, GoalRegion::unconstrained(), start, rng);
    CHECK(g.generator_theta == expected);
    CHECK(g.position == ur5.forward_kinematics(expected));
  }

  SUBCASE("z-height goals all land in the band") {
    const GoalRegion region = GoalRegion::z_height(0.4);
    for (int i = 0; i < 200; ++i) {
      const Goal g = sample_goal(ur5, region, start, rng);
      CHECK(g.position.z() >= 0.0);
      CHECK(g.position.z() <= 0.4);
      CHECK(g.position == ur5.forward_kinematics(g.generator_theta));
      // inactive joints held at start values
      CHECK(g.generator_theta.tail(3) == start.tail(3));
    }
  }

  SUBCASE("unreachable sliver raises the infeasibility error") {
    const GoalRegion sliver =
        GoalRegion::box({5.0, 5.0, 5.0}, {5.0 + 1e-12, 5.0 + 1e-12, 5.0 + 1e-12});
    CHECK_THROWS_AS(sample_goal(ur5, sliver, start, rng, 2000), InfeasibleRegionError);
  }
}

TEST_CASE("reset uses region-appropriate default start poses") {
  SUBCASE("unconstrained starts at zero angles") {
    ReacherEnv env(ur5_model(), basic_config(GoalRegion::unconstrained(), 3), 1);
    env.reset();
    CHECK(env.joint_state().theta.isZero(0.0));
  }
  SUBCASE("constrained regions start elbow-up") {
    ReacherEnv env(ur5_model(), basic_config(GoalRegion::z_height(0.4), 3), 1);
    env.reset();
    const JointVector& theta = env.joint_state().theta;
    CHECK(theta[0] == 0.0);
    CHECK(theta[1] == kPi / 2.0);
    CHECK(theta[2] == kPi / 4.0);
    CHECK(theta.tail(3).isZero(0.0));
  }
  SUBCASE("explicit start_theta wins") {
    EnvConfig cfg = basic_config(GoalRegion::unconstrained(), 2);
    JointVector start = JointVector::Zero(6);
    start[0] = 0.5;
    cfg.start_theta = start;
    ReacherEnv env(ur5_model(), cfg, 1);
    env.reset();
    CHECK(env.joint_state().theta[0] == 0.5);
  }
}

TEST_CASE("observation layout is [theta, dtheta, ddtheta, goal-ee, goal]") {
  for (int n = 2; n <= 6; ++n) {
    ReacherEnv env(ur5_model(), basic_config(GoalRegion::unconstrained(), n), 7);
    const Eigen::VectorXd obs = env.reset();
    REQUIRE(obs.size() == 3 * n + 6);
    CHECK(env.obs_dim() == 3 * n + 6);
    // after reset the last three entries are the goal...
    CHECK(Eigen::Vector3d(obs.tail(3)) == env.goal().position);
    // ...and the difference slots are goal - fk(theta)
    const Eigen::Vector3d diff = env.goal().position - env.end_effector();
    CHECK(Eigen::Vector3d(obs.segment(3 * n, 3)) == diff);
    CHECK(Eigen::VectorXd(obs.head(n)) == Eigen::VectorXd(env.joint_state().theta.head(n)));
  }
}

TEST_CASE("step clamps, terminates, and guards the protocol") {
  EnvConfig cfg = basic_config(GoalRegion::unconstrained(), 2);
  cfg.max_steps = 5;
  ReacherEnv env(ur5_model(), cfg, 3);

  SUBCASE("stationary commands truncate at the step budget") {
    env.reset();
    StepResult res;
    for (int i = 0; i < 5; ++i) {
      REQUIRE_FALSE(env.episode_done());
      res = env.step(JointVector::Zero(2));
    }
    CHECK(res.truncated);
    CHECK_FALSE(res.success);
    CHECK(env.episode_done());
    CHECK_THROWS_AS(env.step(JointVector::Zero(2)), ProtocolError);
  }

  SUBCASE("action length must match the active joints") {
    env.reset();
    CHECK_THROWS_AS(env.step(JointVector::Zero(3)), DimensionError);
  }

  SUBCASE("reward never exceeds 100") {
    env.reset();
    RandomStream rng(5);
    for (int ep = 0; ep < 5; ++ep) {
      env.reset();
      while (!env.episode_done()) {
        JointVector a(2);
        a << rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi);
        const StepResult res = env.step(a);
        CHECK(res.reward <= 100.0);
      }
    }
  }
}

TEST_CASE("driving joints to the generator angles reaches the goal") {
  ReacherEnv env(ur5_model(), basic_config(GoalRegion::unconstrained(), 3), 11);
  env.reset();
  const JointVector target = env.goal().generator_theta.head(3);
  bool success = false;
  double final_reward = 0.0;
  while (!env.episode_done()) {
    const StepResult res = env.step(target);
    success = res.success;
    final_reward = res.reward;
  }
  CHECK(success);
  CHECK(final_reward >= 100.0 - env.config().epsilon - target.squaredNorm());
}

TEST_CASE("identical seeds give identical trajectories") {
  const EnvConfig cfg = basic_config(GoalRegion::z_height(0.4), 3);
  ReacherEnv a(ur5_model(), cfg, 42), b(ur5_model(), cfg, 42);
  RandomStream policy_rng(1);
  for (int ep = 0; ep < 3; ++ep) {
    Eigen::VectorXd obs_a = a.reset();
    Eigen::VectorXd obs_b = b.reset();
    CHECK(obs_a == obs_b);
    while (!a.episode_done()) {
      JointVector act(3);
      for (int j = 0; j < 3; ++j) act[j] = policy_rng.uniform(-kPi, kPi);
      const StepResult ra = a.step(act);
      const StepResult rb = b.step(act);
      CHECK(ra.observation == rb.observation);
      CHECK(ra.reward == rb.reward);
      CHECK(ra.success == rb.success);
      CHECK(ra.truncated == rb.truncated);
    }
    CHECK(b.episode_done());
  }
}

TEST_CASE("reset_with_goal validates region membership") {
  ReacherEnv env(ur5_model(), basic_config(GoalRegion::z_height(0.4), 3), 8);
  Goal outside;
  outside.position = {0.2, 0.2, 0.9};
  outside.generator_theta = JointVector::Zero(6);
  CHECK_THROWS_AS(env.reset_with_goal(outside), ValidationError);

  env.reset();
  const Goal g = env.goal();
  const Eigen::VectorXd obs = env.reset_with_goal(g);
  CHECK(Eigen::Vector3d(obs.tail(3)) == g.position);
}

TEST_CASE("config validation and serialization") {
  EnvConfig cfg = basic_config(GoalRegion::z_height(0.4), 3);
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.epsilon = 0.1;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.dt = 0.02;
  cfg.n_active = 1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.n_active = 3;
  cfg.validate();

  const EnvConfig back = EnvConfig::from_json(cfg.to_json());
  CHECK(back.region == cfg.region);
  CHECK(back.n_active == cfg.n_active);
  CHECK(back.epsilon == cfg.epsilon);
  CHECK(back.max_steps == cfg.max_steps);
  CHECK(back.dt == cfg.dt);
  CHECK(back.omega_max == cfg.omega_max);
  CHECK(back.reward_mode == cfg.reward_mode);
}
