#pragma once

#include <cstdint>
#include <limits>
#include <utility>

namespace ldnoma {

// SplitMix64 (Steele, Lea, Flood 2014). Used only to expand a 64-bit seed
// into generator state.
class SplitMix64 {
public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

// xoshiro256** 1.0 (Blackman, Vigna). State seeded by four SplitMix64 draws.
//
// Every random quantity in the library is derived from this generator with
// the helpers below, never through <random> distributions, so a fixed seed
// gives identical output on every platform and in any other implementation
// of the same three algorithms.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  // Stream for realization `index` of an ensemble seeded with `seed`.
  static Rng for_stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return Rng(seed ^ index);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next(); }
  std::uint64_t next() noexcept;

  // Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  // bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool coin() noexcept { return (next() >> 63) != 0; }

private:
  std::uint64_t s_[4];
};

// Fisher-Yates shuffle from the back, j = below(i + 1).
template <class RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = rng.below(i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

} // namespace ldnoma
