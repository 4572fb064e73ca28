#include "reacherbench/goal_region.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "reacherbench/errors.hpp"

namespace reacherbench {

GoalRegion GoalRegion::unconstrained() { return GoalRegion{}; }

GoalRegion GoalRegion::z_height(double z_max) {
  if (!(std::isfinite(z_max) && z_max > 0.0)) {
    throw ValidationError("goal region: z_max must be > 0, got " + std::to_string(z_max));
  }
  GoalRegion r;
  r.kind_ = Kind::ZHeight;
  r.z_max_ = z_max;
  return r;
}

GoalRegion GoalRegion::box(const Eigen::Vector3d& min, const Eigen::Vector3d& max) {
  if (!(min.allFinite() && max.allFinite() && (min.array() < max.array()).all())) {
    throw ValidationError("goal region: box requires min < max componentwise");
  }
  GoalRegion r;
  r.kind_ = Kind::Box;
  r.min_ = min;
  r.max_ = max;
  return r;
}

bool GoalRegion::contains(const Eigen::Vector3d& p) const {
  switch (kind_) {
    case Kind::Unconstrained:
      return true;
    case Kind::ZHeight:
      return p.z() >= 0.0 && p.z() <= z_max_;
    case Kind::Box:
      return (p.array() >= min_.array()).all() && (p.array() <= max_.array()).all();
  }
  throw ProtocolError("goal region: corrupt variant tag");
}

double GoalRegion::z_max() const {
  if (kind_ != Kind::ZHeight) throw ProtocolError("goal region: z_max on non-z-height variant");
  return z_max_;
}

const Eigen::Vector3d& GoalRegion::box_min() const {
  if (kind_ != Kind::Box) throw ProtocolError("goal region: box_min on non-box variant");
  return min_;
}

const Eigen::Vector3d& GoalRegion::box_max() const {
  if (kind_ != Kind::Box) throw ProtocolError("goal region: box_max on non-box variant");
  return max_;
}

nlohmann::json GoalRegion::to_json() const {
  switch (kind_) {
    case Kind::Unconstrained:
      return {{"type", "unconstrained"}};
    case Kind::ZHeight:
      return {{"type", "z_height"}, {"z_max", z_max_}};
    case Kind::Box:
      return {{"type", "box"},
              {"min", {min_.x(), min_.y(), min_.z()}},
              {"max", {max_.x(), max_.y(), max_.z()}}};
  }
  throw ProtocolError("goal region: corrupt variant tag");
}

namespace {

Eigen::Vector3d vec3_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("goal region: field '" + field + "' must be a 3-element array");
  }
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) {
      throw ParseError("goal region: field '" + field + "' must hold numbers");
    }
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

}  // namespace

GoalRegion GoalRegion::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ParseError("goal region: expected object with string field 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "unconstrained") return unconstrained();
  if (type == "z_height") {
    if (!j.contains("z_max") || !j["z_max"].is_number()) {
      throw ParseError("goal region: z_height requires numeric field 'z_max'");
    }
    return z_height(j["z_max"].get<double>());
  }
  if (type == "box") {
    if (!j.contains("min") || !j.contains("max")) {
      throw ParseError("goal region: box requires fields 'min' and 'max'");
    }
    return box(vec3_from_json(j["min"], "min"), vec3_from_json(j["max"], "max"));
  }
  throw ParseError("goal region: unknown type '" + type + "'");
}

std::string GoalRegion::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Unconstrained:
      out << "unconstrained (whole workspace)";
      break;
    case Kind::ZHeight:
      out << "z-height: 0 <= z <= " << z_max_;
      break;
    case Kind::Box:
      out << "box: x in [" << min_.x() << ", " << max_.x() << "], y in [" << min_.y() << ", "
          << max_.y() << "], z in [" << min_.z() << ", " << max_.z() << "]";
      break;
  }
  return out.str();
}

bool GoalRegion::operator==(const GoalRegion& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Unconstrained:
      return true;
    case Kind::ZHeight:
      return z_max_ == other.z_max_;
    case Kind::Box:
      return min_ == other.min_ && max_ == other.max_;
  }
  return false;
}

}  // namespace reacherbench
