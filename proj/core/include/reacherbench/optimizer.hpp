#pragma once

#include <Eigen/Dense>
#include <vector>

#include "reacherbench/mlp.hpp"

namespace reacherbench {

/// Bias-corrected Adam accumulators shaped like one network's parameters.
struct AdamState {
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  long step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double numeric_floor = 1e-8;

  static AdamState zeros_like(const NetworkParams& params);
  bool same_shape(const NetworkParams& params) const;
};

/// One bias-corrected Adam update of params in the negative gradient
/// direction. Throws NumericError on non-finite gradients or if the update
/// produces non-finite parameters; DimensionError on shape mismatch.
void adam_step(AdamState& opt, NetworkParams& params, const ParamGrads& grads, double lr);

/// target <- tau*source + (1-tau)*target elementwise.
void soft_update(NetworkParams& target, const NetworkParams& source, double tau);

}  // namespace reacherbench
