#pragma once

#include <cstdint>
#include <optional>

namespace ridgeshift {

/// Independent random streams derived from one run seed.
enum class StreamPurpose : std::uint64_t {
  Coefficients = 1,
  Covariates = 2,
  Noise = 3,
  TestInputs = 4,
};

/// Finalizer of SplitMix64 (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Key of the stream used by `purpose` for replicate `index` of a run.
std::uint64_t stream_key(std::uint64_t run_seed, std::uint64_t index,
                         StreamPurpose purpose) noexcept;

/// Counter-based generator: draw i of a stream is mix64(key + (i + 1) * phi),
/// phi = 0x9E3779B97F4A7C15. Output depends only on (key, i), so results do
/// not depend on which thread consumes the stream. Normals use the polar
/// Box-Muller transform and cache the second variate of each pair.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

}  // namespace ridgeshift
