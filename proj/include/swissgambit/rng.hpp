#pragma once

// Counter-based seeding. Every random stream is keyed by a tuple of integers
// (master seed, tournament, round, board, player, option, sample), so results
// do not depend on which worker evaluates what, or in which order.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace swissgambit {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t k : key) h = splitmix64(h ^ splitmix64(k));
  return h;
}

// Distinguishes the purpose of a stream when the remaining key fields coincide.
enum class StreamPurpose : std::uint64_t {
  Tournament = 1,
  GambitSample = 2,
  GambitRealization = 3,
  Strengths = 4,
};

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits; identical on every platform.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi] by rejection sampling.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace swissgambit
