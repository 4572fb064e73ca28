#include "reacherbench/mlp.hpp"

#include <cmath>
#include <string>

#include "reacherbench/errors.hpp"

namespace reacherbench {

void MlpSpec::validate() const {
  if (sizes.size() < 2) throw ValidationError("mlp: need at least input and output widths");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw ValidationError("mlp: layer width " + std::to_string(i) + " must be >= 1");
  }
  if (aux_dim < 0) throw ValidationError("mlp: aux_dim must be >= 0");
  if (aux_dim > 0 && (inject_layer < 0 || inject_layer >= num_layers())) {
    throw ValidationError("mlp: inject_layer " + std::to_string(inject_layer) +
                          " outside [0, " + std::to_string(num_layers() - 1) + "]");
  }
  if (output == OutputActivation::ScaledTanh) {
    const Eigen::Index out = sizes.back();
    if (out_lo.size() != out || out_hi.size() != out) {
      throw ValidationError("mlp: out_lo/out_hi must match the output width");
    }
    if (!((out_lo.array() < out_hi.array()).all())) {
      throw ValidationError("mlp: out_lo must be < out_hi componentwise");
    }
  }
}

int MlpSpec::layer_input_dim(int l) const {
  int dim = sizes[static_cast<std::size_t>(l)];
  if (aux_dim > 0 && l == inject_layer) dim += aux_dim;
  return dim;
}

long MlpSpec::param_count() const {
  long count = 0;
  for (int l = 0; l < num_layers(); ++l) {
    const long rows = sizes[static_cast<std::size_t>(l) + 1];
    count += rows * layer_input_dim(l) + rows;
  }
  return count;
}

bool MlpSpec::operator==(const MlpSpec& other) const {
  return sizes == other.sizes && output == other.output && aux_dim == other.aux_dim &&
         inject_layer == other.inject_layer && out_lo.size() == other.out_lo.size() &&
         out_hi.size() == other.out_hi.size() && out_lo == other.out_lo && out_hi == other.out_hi;
}

bool NetworkParams::same_shape(const NetworkParams& other) const {
  if (W.size() != other.W.size() || b.size() != other.b.size()) return false;
  for (std::size_t l = 0; l < W.size(); ++l) {
    if (W[l].rows() != other.W[l].rows() || W[l].cols() != other.W[l].cols()) return false;
    if (b[l].size() != other.b[l].size()) return false;
  }
  return true;
}

bool NetworkParams::all_finite() const {
  for (const auto& w : W) {
    if (!w.allFinite()) return false;
  }
  for (const auto& v : b) {
    if (!v.allFinite()) return false;
  }
  return true;
}

ParamGrads ParamGrads::zeros_like(const NetworkParams& params) {
  ParamGrads g;
  g.W.reserve(params.W.size());
  g.b.reserve(params.b.size());
  for (const auto& w : params.W) g.W.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& v : params.b) g.b.push_back(Eigen::VectorXd::Zero(v.size()));
  return g;
}

bool ParamGrads::all_finite() const {
  for (const auto& w : W) {
    if (!w.allFinite()) return false;
  }
  for (const auto& v : b) {
    if (!v.allFinite()) return false;
  }
  return true;
}

NetworkParams init_params(const MlpSpec& spec, RandomStream& rng) {
  spec.validate();
  NetworkParams params;
  params.spec = spec;
  const int L = spec.num_layers();
  params.W.reserve(static_cast<std::size_t>(L));
  params.b.reserve(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    const int fan_in = spec.layer_input_dim(l);
    const int rows = spec.sizes[static_cast<std::size_t>(l) + 1];
    const double bound = (l == L - 1) ? 3e-3 : 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd W(rows, fan_in);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < fan_in; ++c) W(r, c) = rng.uniform(-bound, bound);
    }
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) b[r] = rng.uniform(-bound, bound);
    params.W.push_back(std::move(W));
    params.b.push_back(std::move(b));
  }
  return params;
}

Eigen::MatrixXd mlp_forward(const NetworkParams& params, const Eigen::MatrixXd& input,
                            const Eigen::MatrixXd& aux, ForwardCache& cache) {
  const MlpSpec& spec = params.spec;
  if (input.rows() != spec.input_dim()) {
    throw DimensionError("mlp forward: input has " + std::to_string(input.rows()) +
                         " rows, layer expects " + std::to_string(spec.input_dim()));
  }
  if (spec.aux_dim > 0) {
    if (aux.rows() != spec.aux_dim || aux.cols() != input.cols()) {
      throw DimensionError("mlp forward: aux block must be " + std::to_string(spec.aux_dim) +
                           " x batch, got " + std::to_string(aux.rows()) + " x " +
                           std::to_string(aux.cols()));
    }
  } else if (aux.size() != 0) {
    throw DimensionError("mlp forward: aux given to a network with aux_dim = 0");
  }

  const int L = spec.num_layers();
  cache.revision = params.revision;
  cache.layer_in.assign(static_cast<std::size_t>(L), {});
  cache.pre.assign(static_cast<std::size_t>(L), {});

  Eigen::MatrixXd h = input;
  for (int l = 0; l < L; ++l) {
    if (spec.aux_dim > 0 && l == spec.inject_layer) {
      Eigen::MatrixXd joined(h.rows() + aux.rows(), h.cols());
      joined.topRows(h.rows()) = h;
      joined.bottomRows(aux.rows()) = aux;
      h = std::move(joined);
    }
    cache.layer_in[static_cast<std::size_t>(l)] = h;
    Eigen::MatrixXd z = (params.W[static_cast<std::size_t>(l)] * h).colwise() +
                        params.b[static_cast<std::size_t>(l)];
    cache.pre[static_cast<std::size_t>(l)] = z;
    if (l < L - 1) {
      h = z.cwiseMax(0.0);
    } else {
      switch (spec.output) {
        case OutputActivation::Identity:
          h = std::move(z);
          break;
        case OutputActivation::ScaledTanh: {
          const Eigen::ArrayXd mid = (spec.out_lo.array() + spec.out_hi.array()) * 0.5;
          const Eigen::ArrayXd half = (spec.out_hi.array() - spec.out_lo.array()) * 0.5;
          h = ((z.array().tanh().colwise() * half).colwise() + mid).matrix();
          break;
        }
      }
    }
  }
  return h;
}

Eigen::VectorXd mlp_forward(const NetworkParams& params, const Eigen::VectorXd& input) {
  ForwardCache cache;
  return mlp_forward(params, Eigen::MatrixXd(input), Eigen::MatrixXd(), cache).col(0);
}

Eigen::VectorXd mlp_forward(const NetworkParams& params, const Eigen::VectorXd& input,
                            const Eigen::VectorXd& aux) {
  ForwardCache cache;
  return mlp_forward(params, Eigen::MatrixXd(input), Eigen::MatrixXd(aux), cache).col(0);
}

BackwardResult mlp_backward(const NetworkParams& params, const ForwardCache& cache,
                            const Eigen::MatrixXd& output_grad) {
  const MlpSpec& spec = params.spec;
  if (cache.revision != params.revision) {
    throw ProtocolError("mlp backward: cache is stale; parameters changed since forward");
  }
  const int L = spec.num_layers();
  if (static_cast<int>(cache.layer_in.size()) != L || static_cast<int>(cache.pre.size()) != L) {
    throw ProtocolError("mlp backward: cache layer count mismatch");
  }
  const Eigen::Index batch = cache.pre.back().cols();
  if (output_grad.rows() != spec.output_dim() || output_grad.cols() != batch) {
    throw DimensionError("mlp backward: output_grad must be " +
                         std::to_string(spec.output_dim()) + " x " + std::to_string(batch));
  }

  BackwardResult result;
  result.grads.W.resize(static_cast<std::size_t>(L));
  result.grads.b.resize(static_cast<std::size_t>(L));
  result.aux_grad = Eigen::MatrixXd::Zero(spec.aux_dim, batch);

  Eigen::MatrixXd dz;
  switch (spec.output) {
    case OutputActivation::Identity:
      dz = output_grad;
      break;
    case OutputActivation::ScaledTanh: {
      const Eigen::ArrayXd half = (spec.out_hi.array() - spec.out_lo.array()) * 0.5;
      const Eigen::ArrayXXd t = cache.pre.back().array().tanh();
      dz = (output_grad.array() * ((1.0 - t.square()).colwise() * half)).matrix();
      break;
    }
  }

  for (int l = L - 1; l >= 0; --l) {
    const auto idx = static_cast<std::size_t>(l);
    result.grads.W[idx] = dz * cache.layer_in[idx].transpose();
    result.grads.b[idx] = dz.rowwise().sum();
    Eigen::MatrixXd din = params.W[idx].transpose() * dz;
    if (spec.aux_dim > 0 && l == spec.inject_layer) {
      result.aux_grad = din.bottomRows(spec.aux_dim);
      din.conservativeResize(din.rows() - spec.aux_dim, Eigen::NoChange);
    }
    if (l == 0) {
      result.input_grad = std::move(din);
    } else {
      // Rectifier derivative: 1 where the pre-activation was positive.
      dz = (din.array() * (cache.pre[idx - 1].array() > 0.0).cast<double>()).matrix();
    }
  }
  return result;
}

namespace {

// Scalar probe loss used by the finite-difference comparison.
double probe_loss(const NetworkParams& params, const Eigen::VectorXd& input,
                  const Eigen::VectorXd& aux) {
  ForwardCache cache;
  return mlp_forward(params, Eigen::MatrixXd(input),
                     params.spec.aux_dim > 0 ? Eigen::MatrixXd(aux) : Eigen::MatrixXd(), cache)
      .sum();
}

double rel_err(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale <= 1e-7) return 0.0;  // both effectively zero
  return std::abs(analytic - numeric) / scale;
}

}  // namespace

GradCheckReport grad_check(const NetworkParams& params, const Eigen::VectorXd& probe_input,
                           const Eigen::VectorXd& probe_aux, double tol) {
  constexpr double h = 1e-5;
  NetworkParams work = params;  // perturbed copy; revision bumps keep caches honest

  ForwardCache cache;
  const Eigen::MatrixXd out =
      mlp_forward(work, Eigen::MatrixXd(probe_input),
                  work.spec.aux_dim > 0 ? Eigen::MatrixXd(probe_aux) : Eigen::MatrixXd(), cache);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(out.rows(), out.cols());
  const BackwardResult analytic = mlp_backward(work, cache, ones);

  GradCheckReport report;
  auto check = [&](double a, double n) {
    report.max_rel_err = std::max(report.max_rel_err, rel_err(a, n));
  };

  for (std::size_t l = 0; l < work.W.size(); ++l) {
    for (Eigen::Index r = 0; r < work.W[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < work.W[l].cols(); ++c) {
        const double saved = work.W[l](r, c);
        work.W[l](r, c) = saved + h;
        const double up = probe_loss(work, probe_input, probe_aux);
        work.W[l](r, c) = saved - h;
        const double down = probe_loss(work, probe_input, probe_aux);
        work.W[l](r, c) = saved;
        check(analytic.grads.W[l](r, c), (up - down) / (2.0 * h));
      }
    }
    for (Eigen::Index r = 0; r < work.b[l].size(); ++r) {
      const double saved = work.b[l][r];
      work.b[l][r] = saved + h;
      const double up = probe_loss(work, probe_input, probe_aux);
      work.b[l][r] = saved - h;
      const double down = probe_loss(work, probe_input, probe_aux);
      work.b[l][r] = saved;
      check(analytic.grads.b[l][r], (up - down) / (2.0 * h));
    }
  }

  Eigen::VectorXd in = probe_input;
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    const double saved = in[i];
    in[i] = saved + h;
    const double up = probe_loss(work, in, probe_aux);
    in[i] = saved - h;
    const double down = probe_loss(work, in, probe_aux);
    in[i] = saved;
    check(analytic.input_grad(i, 0), (up - down) / (2.0 * h));
  }
  if (work.spec.aux_dim > 0) {
    Eigen::VectorXd aux = probe_aux;
    for (Eigen::Index i = 0; i < aux.size(); ++i) {
      const double saved = aux[i];
      aux[i] = saved + h;
      const double up = probe_loss(work, probe_input, aux);
      aux[i] = saved - h;
      const double down = probe_loss(work, probe_input, aux);
      aux[i] = saved;
      check(analytic.aux_grad(i, 0), (up - down) / (2.0 * h));
    }
  }

  report.pass = report.max_rel_err <= tol;
  return report;
}

GradCheckReport grad_check(const NetworkParams& params, const Eigen::VectorXd& probe_input,
                           double tol) {
  return grad_check(params, probe_input, Eigen::VectorXd(), tol);
}

}  // namespace reacherbench
