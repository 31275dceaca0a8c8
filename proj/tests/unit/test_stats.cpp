#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gsgp/rng.hpp"
#include "gsgp/stats.hpp"

namespace {

// Two-sided p-value by enumerating every sign assignment of the ranks.
double enumerated_p(const std::vector<double>& diffs) {
  std::vector<double> nz;
  for (double d : diffs)
    if (d != 0.0) nz.push_back(d);
  const std::size_t n = nz.size();
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(nz[i]);
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mags[j] < mags[i]) ++less;
      if (mags[j] == mags[i]) ++equal;
    }
    ranks[i] = less + (equal + 1) / 2.0;
  }
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (nz[i] > 0) observed += ranks[i];
  double lower = 0, upper = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += ranks[i];
    if (w <= observed + 1e-9) ++lower;
    if (w >= observed - 1e-9) ++upper;
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / std::ldexp(1.0, static_cast<int>(n)));
}

}  // namespace

TEST_CASE("median") {
  CHECK(gsgp::median({3, 1, 2}) == 2.0);
  CHECK(gsgp::median({4, 1, 3, 2}) == 2.5);
  CHECK(gsgp::median({7}) == 7.0);
  CHECK_THROWS(gsgp::median({}));
  CHECK(gsgp::median_decimal({gsgp::BigInt(3), gsgp::BigInt(1), gsgp::BigInt(2)}) == "2");
  CHECK(gsgp::median_decimal({gsgp::BigInt(1), gsgp::BigInt(2)}) == "1.5");
  const gsgp::BigInt big = gsgp::BigInt(1) << 200;
  CHECK(gsgp::median_decimal({big, big + 2}) == gsgp::to_decimal(big + 1));
}

TEST_CASE("average ranks share ties") {
  const std::vector<double> v{10, 20, 20, 5, 30, 20};
  const auto r = gsgp::average_ranks(v);
  CHECK(r == std::vector<double>{2, 4, 4, 1, 6, 4});
}

TEST_CASE("all-positive differences of six pairs reject") {
  const std::vector<double> x{1.1, 2.2, 3.3, 4.4, 5.5, 6.6};
  const std::vector<double> y{1, 2, 3, 4, 5, 6};
  const auto w = gsgp::wilcoxon_signed_rank(x, y, 0.05);
  CHECK(w.exact);
  CHECK(w.n == 6);
  CHECK(w.w_plus == 21.0);
  CHECK(w.w_minus == 0.0);
  CHECK(w.p_value == doctest::Approx(2.0 / 64.0));
  CHECK(w.reject);
  CHECK(w.direction == 1);
  const auto reverse = gsgp::wilcoxon_signed_rank(y, x, 0.05);
  CHECK(reverse.reject);
  CHECK(reverse.direction == -1);
}

TEST_CASE("five all-positive pairs cannot reach 0.05") {
  const std::vector<double> x{2, 3, 4, 5, 6};
  const std::vector<double> y{1, 1, 1, 1, 1};
  const auto w = gsgp::wilcoxon_signed_rank(x, y);
  CHECK(w.p_value == doctest::Approx(2.0 / 32.0));
  CHECK_FALSE(w.reject);
  CHECK(w.direction == 0);
}

TEST_CASE("too few non-zero differences are inconclusive") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const std::vector<double> y{1, 2, 3, 0, 0, 0};
  const auto w = gsgp::wilcoxon_signed_rank(x, y);
  CHECK(w.n == 3);
  CHECK(w.inconclusive);
  CHECK_FALSE(w.reject);
  CHECK_THROWS(gsgp::wilcoxon_signed_rank(x, std::vector<double>{1, 2}));
}

TEST_CASE("exact test agrees with sign enumeration") {
  gsgp::Rng rng(99);
  int disagreements = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.index(10);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid to produce ties and zeros
      x[i] = std::round(rng.uniform(-2, 4) * 2) / 2;
      y[i] = std::round(rng.uniform(-2, 2) * 2) / 2;
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - y[i];
    const auto w = gsgp::wilcoxon_signed_rank(x, y, 0.05);
    if (w.inconclusive) continue;
    const double p = enumerated_p(d);
    CHECK(w.p_value == doctest::Approx(p).epsilon(1e-12));
    disagreements += (w.reject != (p <= 0.05)) ? 1 : 0;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("normal approximation with ties and continuity correction") {
  const std::vector<double> d{0.5, -1.25, 2.0, 2.0,  -0.75, 1.5, 3.0, -2.0, 0.25, 1.0,  1.0, 1.75, -0.5, 2.5,  0.75,
                              -1.0, 3.5,  1.25, 0.5, -0.25, 2.25, 1.5, -1.5, 2.75, 0.75, 1.0, -3.0, 2.0,  0.5,  1.25};
  const std::vector<double> zero(d.size(), 0.0);
  const auto w = gsgp::wilcoxon_signed_rank(d, zero);
  CHECK_FALSE(w.exact);
  CHECK(w.statistic == 109.5);
  // reference value from an independent statistics package
  CHECK(w.p_value == doctest::Approx(0.011650472307428337).epsilon(1e-9));
  CHECK(w.reject);

  std::vector<double> alt;
  for (int i = 1; i <= 40; ++i) alt.push_back(0.1 * i * (i % 2 == 0 ? 1 : -1));
  const auto v = gsgp::wilcoxon_signed_rank(alt, std::vector<double>(40, 0.0));
  CHECK(v.statistic == 400.0);
  CHECK(v.p_value == doctest::Approx(0.8983924645782683).epsilon(1e-9));
  CHECK_FALSE(v.reject);
}
