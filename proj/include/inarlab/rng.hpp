#pragma once

#include <cstdint>
#include <random>

namespace inarlab {

// Identifies one independent random stream. The engine state is a pure
// function of the two fields.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

using Engine = std::mt19937_64;

inline Engine make_engine(const SeedSpec& seed) {
  const std::uint64_t mixed =
      detail::splitmix64(detail::splitmix64(seed.root_seed) ^ detail::splitmix64(~seed.stream_index));
  return Engine(mixed);
}

// Stream for path `path` of an ensemble seeded with `seed`.
inline SeedSpec path_stream(const SeedSpec& seed, std::uint64_t path) {
  return {seed.root_seed, (seed.stream_index << 32) ^ path};
}

// Fresh root for a named sub-experiment; keeps campaign ensembles disjoint.
inline SeedSpec derive_seed(const SeedSpec& seed, std::uint64_t tag) {
  return {detail::splitmix64(seed.root_seed ^ detail::splitmix64(tag + 0x51ed2701ULL)), seed.stream_index};
}

// Uniform on [0, 1) with 53 random bits. Independent of the library's
// std::uniform_real_distribution so streams are identical across toolchains.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace inarlab
