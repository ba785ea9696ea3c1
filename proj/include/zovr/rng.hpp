#pragma once

#include <cstdint>
#include <random>

namespace zovr {

using Rng = std::mt19937_64;

// Distinguishes independent random streams that share a (seed, agent, round).
enum class StreamTag : std::uint64_t {
  initial_point = 1,
  direction = 2,
  coordinate = 3,
  snapshot = 4,
  topology = 5,
  objective = 6,
  smoothness = 7,
};

std::uint64_t splitmix64(std::uint64_t x);

// Derives a well-mixed 64-bit seed from the master seed and the stream coordinates.
std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t agent = 0,
                          std::uint64_t round = 0);

inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t agent = 0,
                       std::uint64_t round = 0) {
  return Rng(derive_seed(seed, tag, agent, round));
}

}  // namespace zovr
