#include "rpdcov/random.hpp"

namespace rpdcov {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  return splitmix64(splitmix64(master) ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

Engine make_engine(RngSeed seed) {
  // Mixing the pair keeps nearby streams from sharing engine state.
  const std::uint64_t s = splitmix64(splitmix64(seed.master ^ 0xd1b54a32d192ed03ULL) ^ seed.stream_index);
  return Engine(s);
}

}  // namespace rpdcov
