#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsgp/bigint.hpp"
#include "gsgp/expr.hpp"
#include "gsgp/gsgp.hpp"
#include "gsgp/red.hpp"
#include "gsgp/rng.hpp"

namespace gsgp {

/// Inputs of the expected-size recurrences. a, b and c are the extra nodes
/// added per application of mutation, Euclidean crossover and Manhattan
/// crossover; g counts generations of a single operator.
struct GrowthParams {
  double e_p0 = 0.0;
  double e_r = 0.0;
  unsigned a = kGsmExtraNodes;
  unsigned b = kGsxExtraNodes;
  unsigned c = 5;
  std::size_t g = 0;

  /// Throws std::invalid_argument unless e_p0 > 0 and e_r >= 0.
  void validate() const;
};

/// E[P0] + g * (2 E[r] + a)
double expected_size_gsm(const GrowthParams& p);
/// 2^g E[P0] + (2^g - 1) b. Overflows to +inf for very large g; see the
/// log10 variant.
double expected_size_gsx_e(const GrowthParams& p);
/// 2^g E[P0] + (2^g - 1) (E[r] + c)
double expected_size_gsx_m(const GrowthParams& p);

double log10_expected_size_gsm(const GrowthParams& p);
double log10_expected_size_gsx_e(const GrowthParams& p);
double log10_expected_size_gsx_m(const GrowthParams& p);

/// Exact integer evaluation. Throws std::invalid_argument unless e_p0 and e_r
/// are non-negative integers.
BigInt exact_expected_size_gsm(const GrowthParams& p);
BigInt exact_expected_size_gsx_e(const GrowthParams& p);
BigInt exact_expected_size_gsx_m(const GrowthParams& p);

double mean_node_count(std::span<const Expr> trees);

/// Mean exact size after g chained geometric mutations, over `lineages`
/// lineages whose roots are drawn uniformly from `roots`.
double simulate_gsm_lineages(const PointerContext& ctx, std::span<const PointerIndividual> roots, std::size_t g,
                             std::size_t lineages, double delta, int max_depth, Interval erc, Rng& rng);

/// Mean exact size of full binary crossover lineages of depth g (2^g leaves
/// drawn uniformly from `roots`).
double simulate_gsx_lineages(const PointerContext& ctx, std::span<const PointerIndividual> roots, std::size_t g,
                             std::size_t lineages, Rng& rng);

struct FrequencyEntry {
  std::size_t initial_index;
  std::string key;
  /// Number of individuals containing this initial tree as a term.
  std::size_t count;
};

struct FrequencyHistogram {
  /// Sorted by count (descending), then initial index.
  std::vector<FrequencyEntry> entries;
  /// Distinct initial trees still present in the population.
  std::size_t survivors = 0;
  std::size_t population_size = 0;

  std::size_t total() const;
};

/// Counts, per distinct initial-population tree, the individuals that contain
/// it. Random functions are ignored; each individual counts a tree once.
FrequencyHistogram initial_tree_frequency(std::span<const LinearIndividual> population);

std::string to_csv(const FrequencyHistogram& histogram);
nlohmann::json to_json(const FrequencyHistogram& histogram);

}  // namespace gsgp
