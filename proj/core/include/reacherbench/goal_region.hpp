#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>

namespace reacherbench {

/// Workspace subset that episode goals are sampled from. Tagged variant:
/// Unconstrained accepts everything, ZHeight keeps 0 <= z <= z_max, Box keeps
/// min <= p <= max componentwise. All bounds are inclusive.
class GoalRegion {
 public:
  enum class Kind { Unconstrained, ZHeight, Box };

  GoalRegion() = default;  // unconstrained

  static GoalRegion unconstrained();
  /// Requires z_max > 0.
  static GoalRegion z_height(double z_max);
  /// Requires min < max componentwise.
  static GoalRegion box(const Eigen::Vector3d& min, const Eigen::Vector3d& max);

  Kind kind() const { return kind_; }
  bool contains(const Eigen::Vector3d& p) const;

  /// Accessors throw ProtocolError when the variant does not carry the field.
  double z_max() const;
  const Eigen::Vector3d& box_min() const;
  const Eigen::Vector3d& box_max() const;

  /// Serialized as {"type": ..., parameters...}; see from_json for the schema.
  nlohmann::json to_json() const;
  static GoalRegion from_json(const nlohmann::json& j);

  /// One-line human-readable bounds summary.
  std::string describe() const;

  bool operator==(const GoalRegion& other) const;

 private:
  Kind kind_ = Kind::Unconstrained;
  double z_max_ = 0.0;
  Eigen::Vector3d min_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d max_ = Eigen::Vector3d::Zero();
};

}  // namespace reacherbench
