#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace infomotif {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent generator for a named sub-stream ("split", "init", "dropout",
/// "sampling", ...) of a single root seed.
inline Rng substream(std::uint64_t root_seed, std::string_view name) {
  return Rng(splitmix64(root_seed ^ fnv1a64(name)));
}

}  // namespace infomotif
