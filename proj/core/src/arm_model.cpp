#include "reacherbench/arm_model.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <fstream>
#include <sstream>

#include "reacherbench/errors.hpp"

namespace reacherbench {

namespace {

bool all_finite(const LinkRow& row) {
  return std::isfinite(row.a) && std::isfinite(row.d) && std::isfinite(row.alpha) &&
         std::isfinite(row.theta_offset);
}

}  // namespace

ArmModel::ArmModel(std::vector<LinkRow> links, std::vector<JointLimit> limits,
                   double base_height, std::string name)
    : links_(std::move(links)),
      limits_(std::move(limits)),
      n_active_(static_cast<int>(links_.size())),
      base_height_(base_height),
      name_(std::move(name)) {
  if (links_.empty()) throw ValidationError("ArmModel: link table is empty");
  if (limits_.size() != links_.size()) {
    throw ValidationError("ArmModel: " + std::to_string(limits_.size()) + " joint limits for " +
                          std::to_string(links_.size()) + " links");
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (!all_finite(links_[i])) {
      throw ValidationError("ArmModel: non-finite value in link row " + std::to_string(i + 1));
    }
    if (!(limits_[i].lo < limits_[i].hi)) {
      throw ValidationError("ArmModel: joint " + std::to_string(i + 1) + " limit lo (" +
                            std::to_string(limits_[i].lo) + ") must be < hi (" +
                            std::to_string(limits_[i].hi) + ")");
    }
  }
  if (!std::isfinite(base_height_)) throw ValidationError("ArmModel: base_height is not finite");
}

Eigen::Vector3d ArmModel::forward_kinematics(const JointVector& theta) const {
  if (theta.size() != static_cast<Eigen::Index>(links_.size())) {
    throw DimensionError("forward_kinematics: got " + std::to_string(theta.size()) +
                         " joint angles for a " + std::to_string(links_.size()) + "-link chain");
  }
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
  pose.translation().z() = base_height_;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const LinkRow& row = links_[i];
    const double th = theta[static_cast<Eigen::Index>(i)] + row.theta_offset;
    Eigen::Isometry3d link = Eigen::Isometry3d::Identity();
    link.rotate(Eigen::AngleAxisd(th, Eigen::Vector3d::UnitZ()));
    link.translate(Eigen::Vector3d(0.0, 0.0, row.d));
    link.translate(Eigen::Vector3d(row.a, 0.0, 0.0));
    link.rotate(Eigen::AngleAxisd(row.alpha, Eigen::Vector3d::UnitX()));
    pose = pose * link;
  }
  return pose.translation();
}

ArmModel ArmModel::restrict_active(int n) const {
  if (n < 2 || n > total_joints()) {
    throw ValidationError("restrict_active: n = " + std::to_string(n) +
                          " outside [2, " + std::to_string(total_joints()) + "]");
  }
  ArmModel copy = *this;
  copy.n_active_ = n;
  return copy;
}

double ArmModel::reach_bound() const {
  double sum = base_height_;
  for (const LinkRow& row : links_) sum += std::abs(row.a) + std::abs(row.d);
  return sum;
}

JointVector ArmModel::clamp_to_limits(const JointVector& theta) const {
  if (theta.size() != static_cast<Eigen::Index>(links_.size())) {
    throw DimensionError("clamp_to_limits: joint vector length mismatch");
  }
  JointVector out = theta;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const JointLimit& lim = limits_[static_cast<std::size_t>(i)];
    out[i] = std::clamp(out[i], lim.lo, lim.hi);
  }
  return out;
}

Eigen::VectorXd ArmModel::active_lower() const {
  Eigen::VectorXd lo(n_active_);
  for (int i = 0; i < n_active_; ++i) lo[i] = limits_[static_cast<std::size_t>(i)].lo;
  return lo;
}

Eigen::VectorXd ArmModel::active_upper() const {
  Eigen::VectorXd hi(n_active_);
  for (int i = 0; i < n_active_; ++i) hi[i] = limits_[static_cast<std::size_t>(i)].hi;
  return hi;
}

// --- config document -------------------------------------------------------
//
// Line-oriented format, '#' starts a comment:
//   name <string>              optional
//   base_height <m>            optional, default 0
//   link <a> <d> <alpha> <theta_offset>       one per joint, in order
//   limit <lo> <hi>                           one per joint, in order
// Link and limit counts must match.

ArmModel ArmModel::load(const std::string& document) {
  std::vector<LinkRow> links;
  std::vector<JointLimit> limits;
  double base_height = 0.0;
  std::string name;

  std::istringstream in(document);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;

    const std::string where = "arm config line " + std::to_string(line_no);
    if (key == "name") {
      if (!(ls >> name)) throw ParseError(where + ": field 'name' needs a value");
    } else if (key == "base_height") {
      if (!(ls >> base_height)) throw ParseError(where + ": field 'base_height' needs a number");
    } else if (key == "link") {
      LinkRow row;
      if (!(ls >> row.a >> row.d >> row.alpha >> row.theta_offset)) {
        throw ParseError(where + ": field 'link' needs 4 numbers (a d alpha theta_offset)");
      }
      links.push_back(row);
    } else if (key == "limit") {
      JointLimit lim;
      if (!(ls >> lim.lo >> lim.hi)) {
        throw ParseError(where + ": field 'limit' needs 2 numbers (lo hi)");
      }
      limits.push_back(lim);
    } else {
      throw ParseError(where + ": unknown field '" + key + "'");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(where + ": trailing tokens after field '" + key + "'");
  }

  if (links.empty()) throw ParseError("arm config: no 'link' rows found");
  if (limits.empty()) throw ParseError("arm config: no 'limit' rows found");
  return ArmModel(std::move(links), std::move(limits), base_height, std::move(name));
}

ArmModel ArmModel::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open arm config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str());
}

ArmModel ur5_model() {
  constexpr double pi = 3.14159265358979323846;
  const std::vector<LinkRow> links = {
      {0.0, 0.089159, pi / 2.0, 0.0}, {-0.425, 0.0, 0.0, 0.0},    {-0.39225, 0.0, 0.0, 0.0},
      {0.0, 0.10915, pi / 2.0, 0.0},  {0.0, 0.09465, -pi / 2.0, 0.0}, {0.0, 0.0823, 0.0, 0.0}};
  const std::vector<JointLimit> limits(6, JointLimit{-pi, pi});
  return ArmModel(links, limits, 0.0, "ur5");
}

}  // namespace reacherbench
