#pragma once

// Evolutionary skeleton shared by the pointer-based GSGP engine and GSGP-Red.
// Both engines instantiate the same template, so under one seed they consume
// the random stream in the same order:
//   operator choice -> parent(s) by tournament -> k, or (r_m, r_n)
// and their cached semantics come from the same elementwise kernels.

#include <chrono>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsgp/config.hpp"
#include "gsgp/data.hpp"
#include "gsgp/errors.hpp"
#include "gsgp/expr.hpp"
#include "gsgp/report.hpp"
#include "gsgp/rng.hpp"
#include "gsgp/selection.hpp"

namespace gsgp::detail {

inline void gsm_kernel(std::span<const double> parent, double delta, std::span<const double> r_m,
                       std::span<const double> r_n, std::vector<double>& out) {
  out.resize(parent.size());
  for (std::size_t i = 0; i < parent.size(); ++i) out[i] = parent[i] + delta * (r_m[i] - r_n[i]);
}

inline void gsx_kernel(std::span<const double> p1, std::span<const double> p2, double k, std::vector<double>& out) {
  const double k_complement = 1.0 - k;
  out.resize(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) out[i] = k * p1[i] + k_complement * p2[i];
}

inline double mutation_step(const EvolutionConfig& config, const Dataset& train) {
  const double delta = config.ms_fraction * target_std(train);
  if (!(delta > 0.0)) throw DataError("training target has zero variance; geometric mutation step would be zero");
  return delta;
}

template <class Individual>
struct GeometricOutcome {
  std::vector<Individual> population;
  std::size_t best = 0;
};

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Ops must provide:
///   Individual initial(Expr tree)
///   Individual mutate(const Individual&, double delta, Expr r_m, Expr r_n)
///   Individual crossover(const Individual&, const Individual&, double k)
///   double fitness(const Individual&)
///   std::string size_string(const Individual&)
template <class Ops, class Individual = decltype(std::declval<Ops&>().initial(std::declval<Expr>()))>
GeometricOutcome<Individual> evolve_geometric(
    const EvolutionConfig& config, const Dataset& train, double delta, Ops& ops, RunReport& report,
    Clock::time_point start,
    const std::function<void(std::size_t, std::span<const Individual>)>& observer) {
  const auto d = train.num_features();
  Rng rng(config.seed);

  std::vector<Individual> population;
  population.reserve(config.pop_size);
  for (auto& tree : ramped_half_and_half(config.pop_size, config.max_depth, d, config.erc, rng))
    population.push_back(ops.initial(std::move(tree)));

  std::vector<double> fitness(config.pop_size);
  auto refresh = [&] {
    for (std::size_t i = 0; i < population.size(); ++i) fitness[i] = ops.fitness(population[i]);
    return best_index(fitness);
  };
  auto record = [&](std::size_t generation, std::size_t best) {
    report.trace.push_back(
        {generation, fitness[best], ops.size_string(population[best]), seconds_since(start)});
    if (observer) observer(generation, population);
  };

  std::size_t best = refresh();
  record(0, best);
  for (std::size_t g = 1; g <= config.generations; ++g) {
    std::vector<Individual> next;
    next.reserve(config.pop_size);
    next.push_back(population[best]);
    while (next.size() < config.pop_size) {
      if (rng.uniform01() < config.p_crossover) {
        const auto a = tournament_select(fitness, config.tournament_size, rng);
        const auto b = tournament_select(fitness, config.tournament_size, rng);
        const double k = rng.uniform01();
        next.push_back(ops.crossover(population[a], population[b], k));
      } else {
        const auto a = tournament_select(fitness, config.tournament_size, rng);
        auto r_m = grow(config.max_depth, d, config.erc, rng);
        auto r_n = grow(config.max_depth, d, config.erc, rng);
        next.push_back(ops.mutate(population[a], delta, std::move(r_m), std::move(r_n)));
      }
    }
    population = std::move(next);
    best = refresh();
    record(g, best);
  }
  return {std::move(population), best};
}

}  // namespace gsgp::detail
