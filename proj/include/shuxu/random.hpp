#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace shuxu {

// PCG32 (PCG-XSH-RR, 64-bit state, 32-bit output), as in the reference
// pcg32_random_r. The update rule is
//   state' = state * 6364136223846793005 + (stream << 1 | 1)
//   output = rotr32(((state >> 18) ^ state) >> 27, state >> 59)
// where output is computed from the pre-update state. Seeding follows
// pcg32_srandom_r: state = 0, inc = stream << 1 | 1, step, state += seed, step.
class Pcg32 {
 public:
  using result_type = std::uint32_t;

  Pcg32(std::uint64_t seed, std::uint64_t stream) noexcept : inc_((stream << 1u) | 1u) {
    step();
    state_ += seed;
    step();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t old = state_;
    step();
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((0u - rot) & 31u));
  }

  // Unbiased integer in [0, bound) by rejection (pcg32_boundedrand_r).
  std::uint32_t bounded(std::uint32_t bound) noexcept {
    const std::uint32_t threshold = (0u - bound) % bound;
    while (true) {
      const std::uint32_t r = (*this)();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) from 53 bits of two consecutive outputs.
  double uniform() noexcept {
    const std::uint64_t hi = (*this)();
    const std::uint64_t lo = (*this)();
    return static_cast<double>(((hi << 32u) | lo) >> 11u) * 0x1.0p-53;
  }

 private:
  void step() noexcept { state_ = state_ * 6364136223846793005ULL + inc_; }

  std::uint64_t state_ = 0;
  std::uint64_t inc_;
};

// Fisher-Yates, high index down, j = bounded(i + 1).
template <typename T>
void shuffle(std::span<T> items, Pcg32& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.bounded(static_cast<std::uint32_t>(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace shuxu
