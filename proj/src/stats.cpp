#include "gsgp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gsgp {

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::string median_decimal(std::vector<BigInt> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return to_decimal(values[n / 2]);
  const BigInt sum = values[n / 2 - 1] + values[n / 2];
  std::string out = to_decimal(sum / 2);
  if (sum % 2 != 0) out += ".5";
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Exact two-sided p-value of W+ given the (possibly tied) ranks. Ranks are
// doubled so that average ranks become integers.
double exact_p_value(std::span<const double> ranks, double w_plus) {
  std::vector<std::size_t> doubled(ranks.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    total += doubled[i];
  }
  // counts[s]: number of sign assignments whose doubled W+ equals s
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (auto r : doubled) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (counts[s] != 0.0) counts[s + r] += counts[s];
    }
    reach += r;
  }
  const auto observed = static_cast<std::size_t>(std::llround(2.0 * w_plus));
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    if (s <= observed) lower += counts[s];
    if (s >= observed) upper += counts[s];
  }
  const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
  return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

double normal_p_value(std::span<const double> ranks, std::span<const double> magnitudes, double w_plus) {
  const auto n = static_cast<double>(ranks.size());
  double tie_term = 0.0;
  std::vector<double> sorted(magnitudes.begin(), magnitudes.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mean = n * (n + 1.0) / 4.0;
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (variance <= 0.0) return 1.0;
  const double distance = std::max(0.0, std::abs(w_plus - mean) - 0.5);
  const double z = distance / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, double alpha) {
  if (x.size() != y.size()) throw std::invalid_argument("wilcoxon: samples must have equal length");
  std::vector<double> differences;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    if (diff != 0.0) differences.push_back(diff);
  }
  WilcoxonResult result;
  result.n = differences.size();
  if (result.n < kWilcoxonMinPairs) {
    result.inconclusive = true;
    return result;
  }
  std::vector<double> magnitudes(differences.size());
  std::transform(differences.begin(), differences.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
  const auto ranks = average_ranks(magnitudes);
  for (std::size_t i = 0; i < differences.size(); ++i) {
    (differences[i] > 0.0 ? result.w_plus : result.w_minus) += ranks[i];
  }
  result.statistic = std::min(result.w_plus, result.w_minus);
  result.exact = result.n <= kWilcoxonExactLimit;
  result.p_value = result.exact ? exact_p_value(ranks, result.w_plus) : normal_p_value(ranks, magnitudes, result.w_plus);
  result.reject = result.p_value <= alpha;
  if (result.reject) {
    const double m = median(differences);
    result.direction = m > 0.0 ? 1 : m < 0.0 ? -1 : (result.w_plus > result.w_minus ? 1 : -1);
  }
  return result;
}

}  // namespace gsgp
