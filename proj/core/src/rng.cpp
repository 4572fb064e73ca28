#include "reacherbench/rng.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "reacherbench/errors.hpp"

namespace reacherbench {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RandomStream::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RandomStream::gaussian() {
  // u1 in (0,1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RandomStream::index(std::size_t n) {
  if (n == 0) throw ProtocolError("RandomStream::index: n must be > 0");
  return static_cast<std::size_t>(gen_() % n);
}

void RandomStream::save(std::ostream& out) const { out << gen_; }

void RandomStream::restore(std::istream& in) {
  in >> gen_;
  if (!in) throw LoadError("RandomStream::restore: malformed engine state");
}

}  // namespace reacherbench
