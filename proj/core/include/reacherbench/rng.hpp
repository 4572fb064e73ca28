#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>

namespace reacherbench {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed so that e.g. goal sampling, network init, and per-session
/// test streams never share state.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_tag);

/// Seeded random stream with portable draw arithmetic.
///
/// Distributions are implemented on top of raw mt19937_64 output instead of
/// <random> distribution objects, whose draw sequences are implementation
/// defined. Every consumer of randomness in the library goes through this
/// class, which makes whole runs a deterministic function of (config, seed).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller. Two uniforms per draw, no cached spare,
  /// so the stream state alone reproduces the sequence.
  double gaussian();

  /// Uniform index in [0, n). n must be > 0.
  std::size_t index(std::size_t n);

  /// State round-trip for checkpointing (text form of the engine state).
  void save(std::ostream& out) const;
  void restore(std::istream& in);

  bool operator==(const RandomStream& other) const { return gen_ == other.gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace reacherbench
