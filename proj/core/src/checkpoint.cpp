#include "reacherbench/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "reacherbench/errors.hpp"

namespace reacherbench {

namespace {

constexpr char kMagic[8] = {'R', 'B', 'C', 'H', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& in, void* data, std::size_t n) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (!in) throw LoadError("checkpoint: truncated file");
}

void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, &v, sizeof v); }
void put_u32(std::ostream& out, std::uint32_t v) { put_bytes(out, &v, sizeof v); }
void put_f64(std::ostream& out, double v) { put_bytes(out, &v, sizeof v); }

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v;
  get_bytes(in, &v, sizeof v);
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v;
  get_bytes(in, &v, sizeof v);
  return v;
}

double get_f64(std::istream& in) {
  double v;
  get_bytes(in, &v, sizeof v);
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  put_bytes(out, s.data(), s.size());
}

std::string get_string(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  std::string s(n, '\0');
  if (n > 0) get_bytes(in, s.data(), n);
  return s;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
  put_u64(out, static_cast<std::uint64_t>(v.size()));
  put_bytes(out, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

Eigen::VectorXd get_vector(std::istream& in) {
  const auto n = static_cast<Eigen::Index>(get_u64(in));
  Eigen::VectorXd v(n);
  if (n > 0) get_bytes(in, v.data(), sizeof(double) * static_cast<std::size_t>(n));
  return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  put_bytes(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

Eigen::MatrixXd get_matrix(std::istream& in) {
  const auto rows = static_cast<Eigen::Index>(get_u64(in));
  const auto cols = static_cast<Eigen::Index>(get_u64(in));
  Eigen::MatrixXd m(rows, cols);
  if (m.size() > 0) get_bytes(in, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  return m;
}

void put_spec(std::ostream& out, const MlpSpec& spec) {
  put_u64(out, spec.sizes.size());
  for (int s : spec.sizes) put_u64(out, static_cast<std::uint64_t>(s));
  put_u32(out, spec.output == OutputActivation::Identity ? 0u : 1u);
  put_vector(out, spec.out_lo);
  put_vector(out, spec.out_hi);
  put_u64(out, static_cast<std::uint64_t>(spec.aux_dim));
  put_u64(out, static_cast<std::uint64_t>(spec.inject_layer));
}

MlpSpec get_spec(std::istream& in) {
  MlpSpec spec;
  const std::uint64_t n = get_u64(in);
  spec.sizes.resize(n);
  for (auto& s : spec.sizes) s = static_cast<int>(get_u64(in));
  spec.output = get_u32(in) == 0u ? OutputActivation::Identity : OutputActivation::ScaledTanh;
  spec.out_lo = get_vector(in);
  spec.out_hi = get_vector(in);
  spec.aux_dim = static_cast<int>(get_u64(in));
  spec.inject_layer = static_cast<int>(get_u64(in));
  return spec;
}

void put_network(std::ostream& out, const NetworkParams& net) {
  put_spec(out, net.spec);
  put_u64(out, net.W.size());
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    put_matrix(out, net.W[l]);
    put_vector(out, net.b[l]);
  }
}

void get_network(std::istream& in, NetworkParams& net) {
  const MlpSpec spec = get_spec(in);
  if (!(spec == net.spec)) {
    throw LoadError("checkpoint: stored network topology does not match the configured one");
  }
  const std::uint64_t layers = get_u64(in);
  if (layers != net.W.size()) throw LoadError("checkpoint: network layer count mismatch");
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd w = get_matrix(in);
    Eigen::VectorXd b = get_vector(in);
    if (w.rows() != net.W[l].rows() || w.cols() != net.W[l].cols() || b.size() != net.b[l].size()) {
      throw LoadError("checkpoint: layer shape mismatch at layer " + std::to_string(l));
    }
    net.W[l] = std::move(w);
    net.b[l] = std::move(b);
  }
  ++net.revision;
}

void put_adam(std::ostream& out, const AdamState& opt) {
  put_u64(out, static_cast<std::uint64_t>(opt.step_count));
  put_f64(out, opt.beta1);
  put_f64(out, opt.beta2);
  put_f64(out, opt.numeric_floor);
  put_u64(out, opt.mW.size());
  for (std::size_t l = 0; l < opt.mW.size(); ++l) {
    put_matrix(out, opt.mW[l]);
    put_matrix(out, opt.vW[l]);
    put_vector(out, opt.mb[l]);
    put_vector(out, opt.vb[l]);
  }
}

void get_adam(std::istream& in, AdamState& opt) {
  opt.step_count = static_cast<long>(get_u64(in));
  opt.beta1 = get_f64(in);
  opt.beta2 = get_f64(in);
  opt.numeric_floor = get_f64(in);
  const std::uint64_t layers = get_u64(in);
  if (layers != opt.mW.size()) throw LoadError("checkpoint: optimizer layer count mismatch");
  for (std::size_t l = 0; l < layers; ++l) {
    opt.mW[l] = get_matrix(in);
    opt.vW[l] = get_matrix(in);
    opt.mb[l] = get_vector(in);
    opt.vb[l] = get_vector(in);
  }
}

void put_rng(std::ostream& out, const RandomStream& rng) {
  std::ostringstream state;
  rng.save(state);
  put_string(out, state.str());
}

void get_rng(std::istream& in, RandomStream& rng) {
  std::istringstream state(get_string(in));
  rng.restore(state);
}

void put_buffer(std::ostream& out, const ReplayBuffer& buffer) {
  put_u64(out, buffer.capacity());
  put_u64(out, buffer.write_index());
  put_u64(out, buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const Transition& t = buffer.at(i);
    put_vector(out, t.s);
    put_vector(out, t.a);
    put_vector(out, t.s_next);
    put_f64(out, t.r);
    put_u32(out, t.terminal ? 1u : 0u);
  }
}

void get_buffer(std::istream& in, ReplayBuffer& buffer) {
  const std::uint64_t capacity = get_u64(in);
  if (capacity != buffer.capacity()) throw LoadError("checkpoint: buffer capacity mismatch");
  const std::uint64_t write_index = get_u64(in);
  const std::uint64_t count = get_u64(in);
  std::vector<Transition> slots(count);
  for (auto& t : slots) {
    t.s = get_vector(in);
    t.a = get_vector(in);
    t.s_next = get_vector(in);
    t.r = get_f64(in);
    t.terminal = get_u32(in) != 0u;
  }
  buffer.restore(std::move(slots), write_index);
}

CheckpointHeader read_header(std::istream& in, const std::filesystem::path& path) {
  char magic[8];
  get_bytes(in, magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw LoadError("checkpoint: bad magic in " + path.string());
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw LoadError("checkpoint: unsupported version " + std::to_string(version));
  }
  CheckpointHeader header;
  header.config_hash = get_u64(in);
  header.seed = get_u64(in);
  header.episodes_done = get_u64(in);
  return header;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const CheckpointHeader& header,
                     const DdpgAgent& agent, const RandomStream& env_rng) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("checkpoint: cannot open " + tmp.string() + " for writing");
    put_bytes(out, kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_u64(out, header.config_hash);
    put_u64(out, header.seed);
    put_u64(out, header.episodes_done);
    put_rng(out, env_rng);
    put_rng(out, agent.rng);
    put_vector(out, agent.ou_state);
    put_network(out, agent.actor);
    put_network(out, agent.critic);
    put_network(out, agent.target_actor);
    put_network(out, agent.target_critic);
    put_adam(out, agent.actor_opt);
    put_adam(out, agent.critic_opt);
    put_buffer(out, agent.buffer);
    if (!out) throw LoadError("checkpoint: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CheckpointHeader peek_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("checkpoint: cannot open " + path.string());
  return read_header(in, path);
}

CheckpointHeader load_checkpoint(const std::filesystem::path& path, DdpgAgent& agent,
                                 RandomStream& env_rng) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("checkpoint: cannot open " + path.string());
  const CheckpointHeader header = read_header(in, path);
  get_rng(in, env_rng);
  get_rng(in, agent.rng);
  agent.ou_state = get_vector(in);
  get_network(in, agent.actor);
  get_network(in, agent.critic);
  get_network(in, agent.target_actor);
  get_network(in, agent.target_critic);
  get_adam(in, agent.actor_opt);
  get_adam(in, agent.critic_opt);
  get_buffer(in, agent.buffer);
  return header;
}

}  // namespace reacherbench
