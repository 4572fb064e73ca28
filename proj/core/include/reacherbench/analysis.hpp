#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "reacherbench/experiment.hpp"

namespace reacherbench {

/// Workspace tiling parameters for policy success maps: goals whose z lies in
/// [z_lo, z_hi] are binned by floor(x / cell), floor(y / cell).
struct GridSpec {
  double cell_size = 0.1;
  double z_lo = 0.7;
  double z_hi = 0.8;

  void validate() const;
};

struct CellStats {
  long attempts = 0;
  long successes = 0;
};

/// Sparse per-cell success tally over one z-slice of the workspace.
class SuccessGrid {
 public:
  explicit SuccessGrid(const GridSpec& spec);

  bool in_slice(const Eigen::Vector3d& p) const;
  /// Bins an in-slice goal; out-of-slice positions are a protocol error.
  void record(const Eigen::Vector3d& goal, bool success);

  const GridSpec& spec() const { return spec_; }
  const std::map<std::pair<long, long>, CellStats>& cells() const { return cells_; }
  long total_attempts() const;
  long total_successes() const;

  /// CSV rows "ix,iy,x_lo,y_lo,attempts,successes"; header row fixed.
  void write_csv(const std::filesystem::path& path) const;

 private:
  GridSpec spec_;
  std::map<std::pair<long, long>, CellStats> cells_;
};

/// Samples n_samples goals with the environment's own sampler and, for each
/// goal inside the grid's z-slice, runs one deterministic-policy episode and
/// records the outcome in the goal's (x, y) cell. Out-of-slice goals are
/// drawn but not evaluated, so total attempts equal the in-slice goal count.
SuccessGrid success_region_map(const TestPolicy& policy, ReacherEnv& env, long n_samples,
                               const GridSpec& grid);

/// Writes "episode_index,mean,ci_low,ci_high" rows; values round-trip through
/// read_curve to within 1e-12.
void emit_curve(const std::vector<CurvePoint>& curve, const std::filesystem::path& path);
std::vector<CurvePoint> read_curve(const std::filesystem::path& path);

}  // namespace reacherbench
