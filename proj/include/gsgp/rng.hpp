#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace gsgp {

/// Seeded pseudo-random source. All draws are derived from the raw 64-bit
/// engine output with fixed arithmetic, so a seed reproduces the same stream
/// regardless of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Standard normal draw (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with a sequence of coordinates (dataset, fold, repeat,
/// ...) into an independent seed. Pure function of its inputs.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

}  // namespace gsgp
