#include "gsgp/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

namespace gsgp {

void GrowthParams::validate() const {
  if (!(e_p0 > 0.0) || !std::isfinite(e_p0)) throw std::invalid_argument("E[P0] must be positive");
  if (!(e_r >= 0.0) || !std::isfinite(e_r)) throw std::invalid_argument("E[r] must be non-negative");
}

double expected_size_gsm(const GrowthParams& p) {
  p.validate();
  return p.e_p0 + static_cast<double>(p.g) * (2.0 * p.e_r + p.a);
}

namespace {

double doubling(const GrowthParams& p, double per_step) {
  p.validate();
  const double scale = std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(p.g, 4096)));
  return scale * p.e_p0 + (scale - 1.0) * per_step;
}

// log10(2^g E + (2^g - 1) s) = g log10(2) + log10(E + s - s 2^-g)
double log10_doubling(const GrowthParams& p, double per_step) {
  p.validate();
  const double tail = std::ldexp(per_step, -static_cast<int>(std::min<std::size_t>(p.g, 4096)));
  return static_cast<double>(p.g) * std::log10(2.0) + std::log10(p.e_p0 + per_step - tail);
}

BigInt integral(double v, const char* name) {
  if (!(v >= 0.0) || std::floor(v) != v || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("{} must be a non-negative integer for exact evaluation", name));
  }
  return BigInt(fmt::format("{:.0f}", v));
}

BigInt exact_doubling(const GrowthParams& p, const BigInt& per_step) {
  const BigInt e_p0 = integral(p.e_p0, "E[P0]");
  const BigInt scale = BigInt(1) << p.g;
  return scale * e_p0 + (scale - 1) * per_step;
}

}  // namespace

double expected_size_gsx_e(const GrowthParams& p) { return doubling(p, p.b); }
double expected_size_gsx_m(const GrowthParams& p) { return doubling(p, p.e_r + p.c); }

double log10_expected_size_gsm(const GrowthParams& p) { return std::log10(expected_size_gsm(p)); }
double log10_expected_size_gsx_e(const GrowthParams& p) { return log10_doubling(p, p.b); }
double log10_expected_size_gsx_m(const GrowthParams& p) { return log10_doubling(p, p.e_r + p.c); }

BigInt exact_expected_size_gsm(const GrowthParams& p) {
  p.validate();
  return integral(p.e_p0, "E[P0]") + BigInt(p.g) * (2 * integral(p.e_r, "E[r]") + p.a);
}

BigInt exact_expected_size_gsx_e(const GrowthParams& p) {
  p.validate();
  return exact_doubling(p, BigInt(p.b));
}

BigInt exact_expected_size_gsx_m(const GrowthParams& p) {
  p.validate();
  return exact_doubling(p, integral(p.e_r, "E[r]") + p.c);
}

double mean_node_count(std::span<const Expr> trees) {
  if (trees.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : trees) total += static_cast<double>(t.node_count());
  return total / static_cast<double>(trees.size());
}

double simulate_gsm_lineages(const PointerContext& ctx, std::span<const PointerIndividual> roots, std::size_t g,
                             std::size_t lineages, double delta, int max_depth, Interval erc, Rng& rng) {
  if (roots.empty() || lineages == 0) throw std::invalid_argument("need roots and at least one lineage");
  BigInt total = 0;
  for (std::size_t l = 0; l < lineages; ++l) {
    PointerIndividual current = roots[rng.index(roots.size())];
    for (std::size_t step = 0; step < g; ++step) current = gsm(ctx, current, delta, max_depth, erc, rng);
    total += current.exact_size();
  }
  return to_double(total) / static_cast<double>(lineages);
}

namespace {

PointerIndividual crossover_lineage(const PointerContext& ctx, std::span<const PointerIndividual> roots,
                                    std::size_t depth, Rng& rng) {
  if (depth == 0) return roots[rng.index(roots.size())];
  auto left = crossover_lineage(ctx, roots, depth - 1, rng);
  auto right = crossover_lineage(ctx, roots, depth - 1, rng);
  return gsx_e(ctx, left, right, rng);
}

}  // namespace

double simulate_gsx_lineages(const PointerContext& ctx, std::span<const PointerIndividual> roots, std::size_t g,
                             std::size_t lineages, Rng& rng) {
  if (roots.empty() || lineages == 0) throw std::invalid_argument("need roots and at least one lineage");
  BigInt total = 0;
  for (std::size_t l = 0; l < lineages; ++l) total += crossover_lineage(ctx, roots, g, rng).exact_size();
  return to_double(total) / static_cast<double>(lineages);
}

std::size_t FrequencyHistogram::total() const {
  return std::accumulate(entries.begin(), entries.end(), std::size_t{0},
                         [](std::size_t acc, const FrequencyEntry& e) { return acc + e.count; });
}

FrequencyHistogram initial_tree_frequency(std::span<const LinearIndividual> population) {
  std::unordered_map<const StoredFunction*, std::size_t> counts;
  for (const auto& individual : population) {
    std::unordered_map<const StoredFunction*, bool> seen;
    for (const auto& term : individual.terms) {
      const auto* f = term.function.get();
      if (f->provenance != Provenance::Initial) continue;
      if (seen.emplace(f, true).second) ++counts[f];
    }
  }
  FrequencyHistogram histogram;
  histogram.population_size = population.size();
  for (const auto& [f, count] : counts) histogram.entries.push_back({f->initial_index.value_or(0), f->key, count});
  std::sort(histogram.entries.begin(), histogram.entries.end(), [](const auto& a, const auto& b) {
    return a.count != b.count ? a.count > b.count : a.initial_index < b.initial_index;
  });
  histogram.survivors = histogram.entries.size();
  return histogram;
}

std::string to_csv(const FrequencyHistogram& histogram) {
  std::string out = "initial_index,key,count\n";
  for (const auto& e : histogram.entries) {
    fmt::format_to(std::back_inserter(out), "{},\"{}\",{}\n", e.initial_index, e.key, e.count);
  }
  return out;
}

nlohmann::json to_json(const FrequencyHistogram& histogram) {
  auto entries = nlohmann::json::array();
  for (const auto& e : histogram.entries) {
    entries.push_back({{"initial_index", e.initial_index}, {"key", e.key}, {"count", e.count}});
  }
  return nlohmann::json{{"population_size", histogram.population_size},
                        {"survivors", histogram.survivors},
                        {"entries", std::move(entries)}};
}

}  // namespace gsgp
