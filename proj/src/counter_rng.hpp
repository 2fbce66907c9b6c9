#pragma once

#include <cstdint>

namespace injlock {

// Stateless counter-based generator: every draw is a pure function of
// (seed, counter, stream), so pulses can be generated in any order or on any
// thread and still reproduce the same sequence.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  constexpr std::uint64_t bits(std::uint64_t counter, std::uint64_t stream) const noexcept {
    std::uint64_t x = mix(seed_ ^ (stream * 0xD1B54A32D192ED03ull));
    x = mix(x + counter * 0x9E3779B97F4A7C15ull);
    return mix(x ^ (stream + 0x2545F4914F6CDD1Dull));
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter, std::uint64_t stream) const noexcept {
    return static_cast<double>(bits(counter, stream) >> 11) * 0x1.0p-53;
  }

 private:
  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace injlock
