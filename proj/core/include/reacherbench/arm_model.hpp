#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace reacherbench {

/// Vector of joint angles, one entry per joint of the chain (radians).
using JointVector = Eigen::VectorXd;

/// One Denavit-Hartenberg row. The per-link transform is
///   T_i = Rz(theta_i + theta_offset) * Tz(d) * Tx(a) * Rx(alpha)
/// i.e. the classic (distal) convention used by the published UR5 table.
struct LinkRow {
  double a = 0.0;             ///< link length (m)
  double d = 0.0;             ///< link offset (m)
  double alpha = 0.0;         ///< link twist (rad)
  double theta_offset = 0.0;  ///< fixed angle added to the joint variable (rad)
};

struct JointLimit {
  double lo = 0.0;
  double hi = 0.0;
};

/// Kinematic description of a serial revolute chain. Immutable after
/// construction; all member functions are const and safe to call from
/// concurrent workers.
class ArmModel {
 public:
  /// Validates and builds a model. One limit per link is required, each with
  /// lo < hi. n_active defaults to the full chain.
  ArmModel(std::vector<LinkRow> links, std::vector<JointLimit> limits,
           double base_height = 0.0, std::string name = {});

  /// Parse an arm config document (see docs/formats.md for the schema).
  static ArmModel load(const std::string& document);
  static ArmModel load_file(const std::filesystem::path& path);

  /// Cartesian end-effector position in the base frame (base at the origin,
  /// +z up). Pure function of theta.
  Eigen::Vector3d forward_kinematics(const JointVector& theta) const;

  /// Copy of this model with n controlled joints (2 <= n <= total joints).
  /// Joints beyond n are frozen at their episode-start values by the
  /// environment.
  ArmModel restrict_active(int n) const;

  int total_joints() const { return static_cast<int>(links_.size()); }
  int active_joints() const { return n_active_; }
  const std::vector<LinkRow>& links() const { return links_; }
  const std::vector<JointLimit>& limits() const { return limits_; }
  const JointLimit& limit(int joint) const { return limits_.at(static_cast<std::size_t>(joint)); }
  double base_height() const { return base_height_; }
  const std::string& name() const { return name_; }

  /// sum(|a_i| + |d_i|) + base_height: no joint configuration places the end
  /// effector farther from the origin than this.
  double reach_bound() const;

  /// Componentwise clamp of theta into the joint limits.
  JointVector clamp_to_limits(const JointVector& theta) const;

  /// Lower/upper limit vectors of the first n_active joints.
  Eigen::VectorXd active_lower() const;
  Eigen::VectorXd active_upper() const;

 private:
  std::vector<LinkRow> links_;
  std::vector<JointLimit> limits_;
  int n_active_ = 0;
  double base_height_ = 0.0;
  std::string name_;
};

/// The published UR5 kinematic table; identical to the bundled ur5.arm file.
ArmModel ur5_model();

}  // namespace reacherbench
