#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hdmd {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of a named, indexed sub-stream derived from one root seed. Streams
/// with different names or indices are statistically independent, and the
/// value depends on nothing but the three arguments.
inline constexpr std::uint64_t substream_seed(std::uint64_t root, std::string_view name,
                                              std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(root ^ fnv1a64(name)) + splitmix64(index + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t root, std::string_view name, std::uint64_t index = 0) {
  return Engine(substream_seed(root, name, index));
}

/// Uniform draw in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& engine, double lo, double hi) {
  return lo + (hi - lo) * uniform01(engine);
}

}  // namespace hdmd
