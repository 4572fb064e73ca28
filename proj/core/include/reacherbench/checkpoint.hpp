#pragma once

#include <cstdint>
#include <filesystem>

#include "reacherbench/ddpg_agent.hpp"
#include "reacherbench/rng.hpp"

namespace reacherbench {

/// Identifies which run a checkpoint belongs to and how far it got.
struct CheckpointHeader {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t episodes_done = 0;
};

/// Writes the complete training state (header, all four networks, both
/// optimizer states, the full replay buffer, and every random stream) as a
/// versioned little-endian binary file. The write is atomic: a temp file is
/// renamed over the destination.
void save_checkpoint(const std::filesystem::path& path, const CheckpointHeader& header,
                     const DdpgAgent& agent, const RandomStream& env_rng);

/// Reads header fields without restoring any state.
CheckpointHeader peek_checkpoint(const std::filesystem::path& path);

/// Restores state saved by save_checkpoint into an agent constructed from the
/// same config (network shapes must match; LoadError otherwise). Returns the
/// header for resume bookkeeping.
CheckpointHeader load_checkpoint(const std::filesystem::path& path, DdpgAgent& agent,
                                 RandomStream& env_rng);

}  // namespace reacherbench
