#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "reacherbench/errors.hpp"
#include "reacherbench/rng.hpp"

namespace reacherbench {

/// One environment interaction. terminal marks absorbing success states only
/// (step-budget truncation still bootstraps).
struct Transition {
  Eigen::VectorXd s;
  Eigen::VectorXd a;
  Eigen::VectorXd s_next;
  double r = 0.0;
  bool terminal = false;
};

/// Fixed-capacity ring of transitions; the oldest entry is evicted first once
/// full. Sampling is uniform with replacement over the filled region.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ValidationError("replay buffer: capacity must be >= 1");
  }

  void push(Transition t) {
    if (slots_.size() < capacity_) {
      slots_.push_back(std::move(t));
    } else {
      slots_[write_] = std::move(t);
    }
    write_ = (write_ + 1) % capacity_;
  }

  std::size_t size() const { return slots_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t write_index() const { return write_; }

  const Transition& at(std::size_t i) const { return slots_.at(i); }

  /// n slot indices drawn uniformly with replacement. Throws ProtocolError on
  /// an empty buffer.
  std::vector<std::size_t> sample_indices(std::size_t n, RandomStream& rng) const {
    if (slots_.empty()) throw ProtocolError("replay buffer: sample from empty buffer");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = rng.index(slots_.size());
    return idx;
  }

  /// Checkpoint access: raw slots plus write cursor fully determine state.
  const std::vector<Transition>& slots() const { return slots_; }
  void restore(std::vector<Transition> slots, std::size_t write_index) {
    const bool ok = slots.size() == capacity_
                        ? write_index < capacity_
                        : (slots.size() < capacity_ && write_index == slots.size());
    if (!ok) throw LoadError("replay buffer: inconsistent restore state");
    slots_ = std::move(slots);
    write_ = write_index;
  }

 private:
  std::size_t capacity_;
  std::size_t write_ = 0;
  std::vector<Transition> slots_;
};

}  // namespace reacherbench
