#pragma once

#include <cstdint>

namespace ksmooth {

/// Counter-based generator: draw i is splitmix64(seed ⊕ key, i), so any draw
/// can be reproduced without replaying the stream.
class CounterRng {
 public:
  static constexpr const char* kAlgorithm = "splitmix64-counter-v1";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits_at(std::uint64_t counter) const { return mix(key_ + counter * 0x9E3779B97F4A7C15ULL); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(bits_at(counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_bits() { return bits_at(counter_++); }
  double next_uniform() { return uniform_at(counter_++); }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ksmooth
