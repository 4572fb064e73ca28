#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "reacherbench/rng.hpp"

namespace reacherbench {

enum class OutputActivation { Identity, ScaledTanh };

/// Topology of a dense network: affine layers with rectified-linear hidden
/// activations. An optional auxiliary input block of aux_dim entries is
/// concatenated onto the input of layer inject_layer (an action-value network
/// takes the action there; set aux_dim = 0 for a plain chain).
/// ScaledTanh maps the final pre-activation through tanh and affinely onto
/// [out_lo, out_hi] per output coordinate.
struct MlpSpec {
  std::vector<int> sizes;  // layer widths, input first, output last
  OutputActivation output = OutputActivation::Identity;
  Eigen::VectorXd out_lo;  // ScaledTanh only, size = sizes.back()
  Eigen::VectorXd out_hi;
  int aux_dim = 0;
  int inject_layer = 0;

  void validate() const;
  int num_layers() const { return static_cast<int>(sizes.size()) - 1; }
  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  /// Input width of affine layer l, including any injected aux block.
  int layer_input_dim(int l) const;
  long param_count() const;

  bool operator==(const MlpSpec& other) const;
};

/// Weights and biases for an MlpSpec. The revision counter is bumped by every
/// in-place mutation so stale forward caches can be detected.
struct NetworkParams {
  MlpSpec spec;
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;
  std::uint64_t revision = 0;

  bool same_shape(const NetworkParams& other) const;
  bool all_finite() const;
};

/// Per-layer gradients shaped like the parameters of one network.
struct ParamGrads {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;

  static ParamGrads zeros_like(const NetworkParams& params);
  bool all_finite() const;
};

/// Everything the backward pass needs from a forward pass. Valid only while
/// the parameters keep the recorded revision.
struct ForwardCache {
  std::uint64_t revision = 0;
  std::vector<Eigen::MatrixXd> layer_in;  // input actually fed to each layer
  std::vector<Eigen::MatrixXd> pre;       // pre-activation of each layer
};

struct BackwardResult {
  ParamGrads grads;
  Eigen::MatrixXd input_grad;  // d(loss)/d(input), one column per batch item
  Eigen::MatrixXd aux_grad;    // d(loss)/d(aux); zero-rows when aux_dim = 0
};

/// Weights uniform in +-1/sqrt(fan_in) per layer, final layer uniform in
/// +-3e-3 (both weights and biases). Draw order is fixed: per layer, weight
/// rows in order, then the bias. Deterministic given the stream state.
NetworkParams init_params(const MlpSpec& spec, RandomStream& rng);

/// Batch forward pass; inputs are columns. aux must have aux_dim rows (pass
/// an empty matrix when aux_dim = 0).
Eigen::MatrixXd mlp_forward(const NetworkParams& params, const Eigen::MatrixXd& input,
                            const Eigen::MatrixXd& aux, ForwardCache& cache);
/// Single-vector convenience overloads (no cache, or cache for backward).
Eigen::VectorXd mlp_forward(const NetworkParams& params, const Eigen::VectorXd& input);
Eigen::VectorXd mlp_forward(const NetworkParams& params, const Eigen::VectorXd& input,
                            const Eigen::VectorXd& aux);

/// Reverse-mode gradients of the forward map recorded in cache. output_grad
/// has one column per batch item. Throws ProtocolError when the cache does
/// not match the parameters' current revision.
BackwardResult mlp_backward(const NetworkParams& params, const ForwardCache& cache,
                            const Eigen::MatrixXd& output_grad);

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
};

/// Compares analytic gradients of loss = sum(output) against central finite
/// differences (h = 1e-5) over every parameter and input coordinate.
/// Coordinate pairs where both magnitudes are at most 1e-7 count as matching.
GradCheckReport grad_check(const NetworkParams& params, const Eigen::VectorXd& probe_input,
                           const Eigen::VectorXd& probe_aux, double tol);
GradCheckReport grad_check(const NetworkParams& params, const Eigen::VectorXd& probe_input,
                           double tol);

}  // namespace reacherbench
