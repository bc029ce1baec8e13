#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dsanneal {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for the named stream `tag` (and optional index) under a base seed.
/// Distinct (tag, index) pairs give statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) {
  return splitmix64(splitmix64(base ^ fnv1a(tag)) + splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) {
  return Rng(derive_seed(base, tag, index));
}

}  // namespace dsanneal
