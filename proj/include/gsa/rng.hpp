#pragma once

#include <cstdint>
#include <limits>

namespace gsa {

/// Counter-based generator: the k-th output is a SplitMix64 finalizer applied
/// to key + k * golden-gamma. Streams with different keys do not overlap in
/// practice, and any position can be reached in O(1) with `discard`.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key = 0) noexcept : key_(mix(key)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return mix(key_ + kGamma * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  void discard(std::uint64_t n) noexcept { counter_ += n; }

  /// Independent child stream, deterministic in (this key, index).
  [[nodiscard]] CounterRng split(std::uint64_t index) const noexcept {
    CounterRng child;
    child.key_ = mix(key_ ^ mix(index + 0x632BE59BD9B4E019ULL));
    return child;
  }

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Seed for one trial of an experiment.
constexpr std::uint64_t trial_seed(std::uint64_t base_seed,
                                   std::uint64_t trial_index) noexcept {
  return base_seed ^ trial_index;
}

}  // namespace gsa
