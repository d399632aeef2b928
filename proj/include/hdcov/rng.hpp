#pragma once

// Per-replication random streams. Stream k of a run is a pure function of
// (seed, k, purpose), so replications can run in any order on any number of
// threads and still draw the same numbers.

#include <cstdint>
#include <random>

namespace hdcov {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

enum class StreamPurpose : std::uint64_t {
  Replication = 1,
  Nuisance = 2,
  Mixture = 3,
  Oracle = 4,
  Split = 5,
};

inline Engine make_stream(std::uint64_t seed, std::uint64_t index,
                          StreamPurpose purpose = StreamPurpose::Replication) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ static_cast<std::uint64_t>(purpose));
  const std::uint64_t c = splitmix64(b + index);
  std::seed_seq seq{static_cast<std::uint32_t>(c),
                    static_cast<std::uint32_t>(c >> 32),
                    static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  return Engine(seq);
}

}  // namespace hdcov
