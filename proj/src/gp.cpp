#include "gsgp/gp.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "gsgp/errors.hpp"
#include "gsgp/selection.hpp"

namespace gsgp {

double fitness_from_semantics(std::span<const double> outputs, std::span<const double> target) {
  for (double v : outputs)
    if (!std::isfinite(v)) return kWorstFitness;
  const double e = rmse(outputs, target);
  return std::isfinite(e) ? e : kWorstFitness;
}

std::size_t tournament_select(std::span<const double> fitness, std::size_t k, Rng& rng) {
  std::size_t winner = rng.index(fitness.size());
  for (std::size_t i = 1; i < k; ++i) {
    const auto challenger = rng.index(fitness.size());
    if (fitness[challenger] < fitness[winner]) winner = challenger;
  }
  return winner;
}

std::size_t best_index(std::span<const double> fitness) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < fitness.size(); ++i)
    if (fitness[i] < fitness[best]) best = i;
  return best;
}

Expr subtree_crossover(const Expr& p1, const Expr& p2, Rng& rng) {
  const auto site = rng.index(p1.node_count());
  const auto donor = rng.index(p2.node_count());
  return replace_at(p1, site, node_at(p2, donor));
}

Expr subtree_mutation(const Expr& p, int max_depth, std::size_t num_vars, Interval erc, Rng& rng) {
  const auto site = rng.index(p.node_count());
  return replace_at(p, site, grow(max_depth, num_vars, erc, rng));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

GpIndividual make_individual(Expr tree, const Dataset& train) {
  const auto outputs = raw_semantics(tree, train.features);
  const double fitness = fitness_from_semantics(outputs, train.target);
  return GpIndividual{std::move(tree), fitness};
}

}  // namespace

GpResult evolve_gp(const EvolutionConfig& config, const Dataset& train, const Dataset& test,
                   const GpObserver& observer) {
  config.validate();
  if (train.num_features() != test.num_features()) {
    throw ConfigError("training and test sets have different feature counts");
  }
  const auto start = Clock::now();
  const auto d = train.num_features();
  Rng rng(config.seed);

  std::vector<GpIndividual> population;
  population.reserve(config.pop_size);
  for (auto& tree : ramped_half_and_half(config.pop_size, config.max_depth, d, config.erc, rng))
    population.push_back(make_individual(std::move(tree), train));

  GpResult result;
  auto& report = result.report;
  report.engine = "gp";
  report.dataset = train.name;
  report.config = config;
  report.n_train = train.size();
  report.source_columns = train.source_columns;
  report.n_test = test.size();
  report.num_features = d;

  std::vector<double> fitness(config.pop_size);
  auto refresh = [&] {
    for (std::size_t i = 0; i < population.size(); ++i) fitness[i] = population[i].fitness;
    return best_index(fitness);
  };
  auto record = [&](std::size_t generation, std::size_t best) {
    report.trace.push_back({generation, population[best].fitness,
                            std::to_string(population[best].tree.node_count()), seconds_since(start)});
    if (observer) observer(generation, population);
  };

  std::size_t best = refresh();
  record(0, best);
  for (std::size_t g = 1; g <= config.generations; ++g) {
    std::vector<GpIndividual> next;
    next.reserve(config.pop_size);
    next.push_back(population[best]);
    while (next.size() < config.pop_size) {
      Expr child = [&] {
        if (rng.uniform01() < config.p_crossover) {
          const auto a = tournament_select(fitness, config.tournament_size, rng);
          const auto b = tournament_select(fitness, config.tournament_size, rng);
          return subtree_crossover(population[a].tree, population[b].tree, rng);
        }
        const auto a = tournament_select(fitness, config.tournament_size, rng);
        return subtree_mutation(population[a].tree, config.max_depth, d, config.erc, rng);
      }();
      next.push_back(make_individual(std::move(child), train));
    }
    population = std::move(next);
    best = refresh();
    record(g, best);
  }

  const auto& winner = population[best];
  report.final_train_rmse = winner.fitness;
  report.final_test_rmse = fitness_from_semantics(raw_semantics(winner.tree, test.features), test.target);
  report.best_size = std::to_string(winner.tree.node_count());
  report.best_prefix = canonical_key(winner.tree);
  report.best_infix = to_infix(winner.tree);
  report.wall_time_seconds = seconds_since(start);
  result.population = std::move(population);
  result.best = best;
  return result;
}

RunReport run_gp(const EvolutionConfig& config, const Dataset& train, const Dataset& test) {
  return evolve_gp(config, train, test).report;
}

}  // namespace gsgp
