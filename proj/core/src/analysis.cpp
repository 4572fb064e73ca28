#include "reacherbench/analysis.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "reacherbench/errors.hpp"

namespace reacherbench {

void GridSpec::validate() const {
  if (!(cell_size > 0.0)) throw ValidationError("grid: cell_size must be > 0");
  if (!(z_lo < z_hi)) throw ValidationError("grid: need z_lo < z_hi");
}

SuccessGrid::SuccessGrid(const GridSpec& spec) : spec_(spec) { spec_.validate(); }

bool SuccessGrid::in_slice(const Eigen::Vector3d& p) const {
  return p.z() >= spec_.z_lo && p.z() <= spec_.z_hi;
}

void SuccessGrid::record(const Eigen::Vector3d& goal, bool success) {
  if (!in_slice(goal)) throw ProtocolError("success grid: position outside the z-slice");
  const long ix = static_cast<long>(std::floor(goal.x() / spec_.cell_size));
  const long iy = static_cast<long>(std::floor(goal.y() / spec_.cell_size));
  CellStats& cell = cells_[{ix, iy}];
  ++cell.attempts;
  if (success) ++cell.successes;
}

long SuccessGrid::total_attempts() const {
  long total = 0;
  for (const auto& [key, cell] : cells_) total += cell.attempts;
  return total;
}

long SuccessGrid::total_successes() const {
  long total = 0;
  for (const auto& [key, cell] : cells_) total += cell.successes;
  return total;
}

void SuccessGrid::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError("success grid: cannot open " + path.string() + " for writing");
  out << "ix,iy,x_lo,y_lo,attempts,successes\n";
  out << std::setprecision(17);
  for (const auto& [key, cell] : cells_) {
    out << key.first << ',' << key.second << ',' << key.first * spec_.cell_size << ','
        << key.second * spec_.cell_size << ',' << cell.attempts << ',' << cell.successes << '\n';
  }
  if (!out) throw LoadError("success grid: write failed for " + path.string());
}

SuccessGrid success_region_map(const TestPolicy& policy, ReacherEnv& env, long n_samples,
                               const GridSpec& grid) {
  if (n_samples < 1) throw ValidationError("success map: n_samples must be >= 1");
  SuccessGrid result(grid);
  const JointVector start = *env.config().start_theta;
  for (long i = 0; i < n_samples; ++i) {
    const Goal goal = sample_goal(env.model(), env.config().region, start, env.rng());
    if (!result.in_slice(goal.position)) continue;
    Eigen::VectorXd obs = env.reset_with_goal(goal);
    bool success = false;
    while (true) {
      const StepResult res = env.step(policy(env, obs));
      obs = res.observation;
      if (res.success) {
        success = true;
        break;
      }
      if (res.truncated) break;
    }
    result.record(goal.position, success);
  }
  return result;
}

void emit_curve(const std::vector<CurvePoint>& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError("curve: cannot open " + path.string() + " for writing");
  out << "episode_index,mean,ci_low,ci_high\n";
  out << std::setprecision(17);
  for (const CurvePoint& p : curve) {
    out << p.episode_index << ',' << p.mean << ',' << p.ci_low << ',' << p.ci_high << '\n';
  }
  if (!out) throw LoadError("curve: write failed for " + path.string());
}

std::vector<CurvePoint> read_curve(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("curve: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "episode_index,mean,ci_low,ci_high") {
    throw ParseError("curve " + path.string() + ": missing or wrong header row");
  }
  std::vector<CurvePoint> curve;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    CurvePoint p;
    char c1, c2, c3;
    if (!(ls >> p.episode_index >> c1 >> p.mean >> c2 >> p.ci_low >> c3 >> p.ci_high) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw ParseError("curve " + path.string() + " line " + std::to_string(line_no) +
                       ": expected 'episode_index,mean,ci_low,ci_high'");
    }
    curve.push_back(p);
  }
  return curve;
}

}  // namespace reacherbench
