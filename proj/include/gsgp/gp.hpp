#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gsgp/config.hpp"
#include "gsgp/data.hpp"
#include "gsgp/expr.hpp"
#include "gsgp/report.hpp"
#include "gsgp/rng.hpp"

namespace gsgp {

struct GpIndividual {
  Expr tree;
  double fitness;
};

/// Replaces a uniformly chosen node of p1 with a uniformly chosen subtree of
/// p2. The p1 site is drawn before the p2 site.
Expr subtree_crossover(const Expr& p1, const Expr& p2, Rng& rng);

/// Replaces a uniformly chosen node of p with grow(max_depth).
Expr subtree_mutation(const Expr& p, int max_depth, std::size_t num_vars, Interval erc, Rng& rng);

struct GpResult {
  RunReport report;
  std::vector<GpIndividual> population;
  std::size_t best = 0;
};

using GpObserver = std::function<void(std::size_t generation, std::span<const GpIndividual> population)>;

/// Generational GP with elitism of one. Slot 0 of every new generation is
/// the previous best, unchanged; the rest are offspring produced by subtree
/// crossover (probability p_crossover) or subtree mutation.
GpResult evolve_gp(const EvolutionConfig& config, const Dataset& train, const Dataset& test,
                   const GpObserver& observer = {});

RunReport run_gp(const EvolutionConfig& config, const Dataset& train, const Dataset& test);

}  // namespace gsgp
