#include "reacherbench/optimizer.hpp"

#include <cmath>
#include <string>

#include "reacherbench/errors.hpp"

namespace reacherbench {

AdamState AdamState::zeros_like(const NetworkParams& params) {
  AdamState s;
  s.mW.reserve(params.W.size());
  s.vW.reserve(params.W.size());
  s.mb.reserve(params.b.size());
  s.vb.reserve(params.b.size());
  for (const auto& w : params.W) {
    s.mW.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    s.vW.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& v : params.b) {
    s.mb.push_back(Eigen::VectorXd::Zero(v.size()));
    s.vb.push_back(Eigen::VectorXd::Zero(v.size()));
  }
  return s;
}

bool AdamState::same_shape(const NetworkParams& params) const {
  if (mW.size() != params.W.size() || mb.size() != params.b.size()) return false;
  for (std::size_t l = 0; l < mW.size(); ++l) {
    if (mW[l].rows() != params.W[l].rows() || mW[l].cols() != params.W[l].cols()) return false;
    if (mb[l].size() != params.b[l].size()) return false;
  }
  return true;
}

void adam_step(AdamState& opt, NetworkParams& params, const ParamGrads& grads, double lr) {
  if (grads.W.size() != params.W.size() || grads.b.size() != params.b.size()) {
    throw DimensionError("adam_step: gradient layer count mismatch");
  }
  for (std::size_t l = 0; l < params.W.size(); ++l) {
    if (grads.W[l].rows() != params.W[l].rows() || grads.W[l].cols() != params.W[l].cols() ||
        grads.b[l].size() != params.b[l].size()) {
      throw DimensionError("adam_step: gradient shape mismatch at layer " + std::to_string(l));
    }
  }
  if (!opt.same_shape(params)) throw DimensionError("adam_step: optimizer state shape mismatch");
  if (!grads.all_finite()) {
    throw NumericError("adam_step: non-finite gradient at optimizer step " +
                       std::to_string(opt.step_count + 1));
  }

  ++opt.step_count;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step_count));

  for (std::size_t l = 0; l < params.W.size(); ++l) {
    opt.mW[l] = opt.beta1 * opt.mW[l] + (1.0 - opt.beta1) * grads.W[l];
    opt.vW[l] = opt.beta2 * opt.vW[l] + (1.0 - opt.beta2) * grads.W[l].cwiseProduct(grads.W[l]);
    params.W[l].array() -=
        lr * (opt.mW[l].array() / c1) / ((opt.vW[l].array() / c2).sqrt() + opt.numeric_floor);

    opt.mb[l] = opt.beta1 * opt.mb[l] + (1.0 - opt.beta1) * grads.b[l];
    opt.vb[l] = opt.beta2 * opt.vb[l] + (1.0 - opt.beta2) * grads.b[l].cwiseProduct(grads.b[l]);
    params.b[l].array() -=
        lr * (opt.mb[l].array() / c1) / ((opt.vb[l].array() / c2).sqrt() + opt.numeric_floor);
  }
  ++params.revision;

  if (!params.all_finite()) {
    throw NumericError("adam_step: parameters became non-finite at optimizer step " +
                       std::to_string(opt.step_count));
  }
}

void soft_update(NetworkParams& target, const NetworkParams& source, double tau) {
  if (!target.same_shape(source)) throw DimensionError("soft_update: network shape mismatch");
  for (std::size_t l = 0; l < target.W.size(); ++l) {
    target.W[l] = tau * source.W[l] + (1.0 - tau) * target.W[l];
    target.b[l] = tau * source.b[l] + (1.0 - tau) * target.b[l];
  }
  ++target.revision;
}

}  // namespace reacherbench
