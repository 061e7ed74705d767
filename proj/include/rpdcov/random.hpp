#pragma once

#include <cstdint>
#include <random>

namespace rpdcov {

using Engine = std::mt19937_64;

/// A reproducible random stream: identical (master, stream_index) always
/// yields the identical draw sequence, independent of evaluation order.
struct RngSeed {
  std::uint64_t master = 0;
  std::uint64_t stream_index = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child master seed from a parent and a tag; used to give
/// permutation replicates and simulation cells their own seed trees.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag);

Engine make_engine(RngSeed seed);

}  // namespace rpdcov
