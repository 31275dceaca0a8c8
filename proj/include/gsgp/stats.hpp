#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gsgp/bigint.hpp"

namespace gsgp {

/// Median; even-length samples use the mean of the two middle values.
/// Throws std::invalid_argument on an empty sample.
double median(std::vector<double> values);

/// Median of exact integers as a decimal string ("12" or "12.5").
std::string median_decimal(std::vector<BigInt> values);

/// Average ranks (1-based) of the values, ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

struct WilcoxonResult {
  /// Pairs left after discarding zero differences.
  std::size_t n = 0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  /// min(W+, W-).
  double statistic = 0.0;
  double p_value = 1.0;
  bool exact = false;
  bool inconclusive = false;
  bool reject = false;
  /// Sign of the median of x - y when the null is rejected, else 0.
  int direction = 0;
};

inline constexpr std::size_t kWilcoxonMinPairs = 5;
inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Two-sided Wilcoxon signed-rank test of x against y. Zero differences are
/// discarded and tied magnitudes share average ranks. Uses the exact
/// permutation distribution for n <= 25 and the tie-corrected normal
/// approximation (with continuity correction) above. Fewer than 5 non-zero
/// differences yield an inconclusive, non-rejecting result.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, double alpha = 0.05);

}  // namespace gsgp
