#pragma once

#include <cstdint>
#include <random>

namespace hypercore {

// splitmix64; used to derive independent substreams from one master seed so
// that parallel batches stay reproducible.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream i of master seed s is mt19937_64 seeded from splitmix64(s ^ h(i)).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t x = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  std::mt19937_64 gen(splitmix64(x));
  gen.discard(8);
  return gen;
}

}  // namespace hypercore
