#pragma once

#include <cstdint>
#include <random>

namespace savrl {

// All randomness flows through explicitly passed engines; nothing in the
// library touches a global RNG.
using RngEngine = std::mt19937_64;

// SplitMix64 mixing step, used to derive decorrelated stream seeds from a
// base seed (one stream per env / agent / run).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x51ed2701ull));
}

inline RngEngine make_rng(std::uint64_t seed) { return RngEngine(seed); }

}  // namespace savrl
