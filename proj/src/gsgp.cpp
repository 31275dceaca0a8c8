#include "gsgp/gsgp.hpp"

#include <unordered_map>

#include <fmt/format.h>

#include "gsgp/detail/geometric_loop.hpp"
#include "gsgp/errors.hpp"
#include "gsgp/selection.hpp"

namespace gsgp {

PointerContext::PointerContext(const Dataset& train, const Dataset& test) : train_(&train), test_(&test) {
  if (train.num_features() != test.num_features()) {
    throw ConfigError("training and test sets have different feature counts");
  }
}

PointerIndividual PointerContext::initial(Expr tree) const {
  auto train = raw_semantics(tree, train_->features);
  auto test = raw_semantics(tree, test_->features);
  const double fitness = fitness_from_semantics(train, train_->target);
  BigInt size = tree.node_count();
  auto lineage = std::make_shared<const Lineage>(Lineage{InitialOrigin{std::move(tree)}, std::move(size)});
  return {std::move(lineage), std::move(train), std::move(test), fitness};
}

PointerIndividual PointerContext::gsm(const PointerIndividual& parent, double delta, Expr r_m, Expr r_n) const {
  if (!(delta > 0.0)) throw std::invalid_argument("geometric mutation step must be positive");
  PointerIndividual child;
  detail::gsm_kernel(parent.train, delta, raw_semantics(r_m, train_->features),
                     raw_semantics(r_n, train_->features), child.train);
  detail::gsm_kernel(parent.test, delta, raw_semantics(r_m, test_->features), raw_semantics(r_n, test_->features),
                     child.test);
  child.fitness = fitness_from_semantics(child.train, train_->target);
  BigInt size = parent.exact_size() + r_m.node_count() + r_n.node_count() + kGsmExtraNodes;
  child.lineage = std::make_shared<const Lineage>(
      Lineage{GsmOrigin{parent.lineage, std::move(r_m), std::move(r_n), delta}, std::move(size)});
  return child;
}

PointerIndividual PointerContext::gsx_e(const PointerIndividual& p1, const PointerIndividual& p2, double k) const {
  if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("crossover weight must lie in [0, 1]");
  PointerIndividual child;
  detail::gsx_kernel(p1.train, p2.train, k, child.train);
  detail::gsx_kernel(p1.test, p2.test, k, child.test);
  child.fitness = fitness_from_semantics(child.train, train_->target);
  BigInt size = p1.exact_size() + p2.exact_size() + kGsxExtraNodes;
  child.lineage = std::make_shared<const Lineage>(Lineage{GsxOrigin{p1.lineage, p2.lineage, k}, std::move(size)});
  return child;
}

PointerIndividual gsm(const PointerContext& ctx, const PointerIndividual& parent, double delta, int max_depth,
                      Interval erc, Rng& rng) {
  const auto d = ctx.train().num_features();
  auto r_m = grow(max_depth, d, erc, rng);
  auto r_n = grow(max_depth, d, erc, rng);
  return ctx.gsm(parent, delta, std::move(r_m), std::move(r_n));
}

PointerIndividual gsx_e(const PointerContext& ctx, const PointerIndividual& p1, const PointerIndividual& p2,
                        Rng& rng) {
  return ctx.gsx_e(p1, p2, rng.uniform01());
}

namespace {

struct Materializer {
  std::unordered_map<const Lineage*, Expr> done;

  Expr operator()(const LineageRef& node) {
    if (auto it = done.find(node.get()); it != done.end()) return it->second;
    Expr out = std::visit(
        [&](const auto& origin) -> Expr {
          using T = std::decay_t<decltype(origin)>;
          if constexpr (std::is_same_v<T, InitialOrigin>) {
            return origin.tree;
          } else if constexpr (std::is_same_v<T, GsmOrigin>) {
            return Expr::add((*this)(origin.parent),
                             Expr::mul(Expr::constant(origin.delta), Expr::sub(origin.r_m, origin.r_n)));
          } else {
            return Expr::add(Expr::mul(Expr::constant(origin.k), (*this)(origin.p1)),
                             Expr::mul(Expr::constant(1.0 - origin.k), (*this)(origin.p2)));
          }
        },
        node->origin);
    done.emplace(node.get(), out);
    return out;
  }
};

}  // namespace

Expr reconstruct(const LineageRef& lineage, std::uint64_t node_budget) {
  if (lineage->exact_size > node_budget) {
    throw BudgetError(to_decimal(lineage->exact_size),
                      fmt::format("individual has {} nodes, above the budget of {}", to_decimal(lineage->exact_size),
                                  node_budget));
  }
  Materializer materialize;
  return materialize(lineage);
}

Expr reconstruct(const PointerIndividual& individual, std::uint64_t node_budget) {
  return reconstruct(individual.lineage, node_budget);
}

namespace {

struct PointerOps {
  const PointerContext& ctx;

  PointerIndividual initial(Expr tree) { return ctx.initial(std::move(tree)); }
  PointerIndividual mutate(const PointerIndividual& p, double delta, Expr r_m, Expr r_n) {
    return ctx.gsm(p, delta, std::move(r_m), std::move(r_n));
  }
  PointerIndividual crossover(const PointerIndividual& a, const PointerIndividual& b, double k) {
    return ctx.gsx_e(a, b, k);
  }
  double fitness(const PointerIndividual& p) const { return p.fitness; }
  std::string size_string(const PointerIndividual& p) const { return to_decimal(p.exact_size()); }
};

}  // namespace

GsgpResult evolve_gsgp(const EvolutionConfig& config, const Dataset& train, const Dataset& test,
                       const GsgpObserver& observer) {
  config.validate();
  const auto start = detail::Clock::now();
  const PointerContext ctx(train, test);
  const double delta = detail::mutation_step(config, train);

  GsgpResult result;
  auto& report = result.report;
  report.engine = "gsgp";
  report.dataset = train.name;
  report.config = config;
  report.n_train = train.size();
  report.source_columns = train.source_columns;
  report.n_test = test.size();
  report.num_features = train.num_features();
  report.mutation_step = delta;

  PointerOps ops{ctx};
  auto outcome = detail::evolve_geometric(config, train, delta, ops, report, start, observer);

  const auto& winner = outcome.population[outcome.best];
  report.final_train_rmse = winner.fitness;
  report.final_test_rmse = fitness_from_semantics(winner.test, test.target);
  report.best_size = to_decimal(winner.exact_size());
  try {
    const auto tree = reconstruct(winner, config.node_budget);
    report.best_prefix = canonical_key(tree);
    report.best_infix = to_infix(tree);
  } catch (const BudgetError& e) {
    report.expression_note = fmt::format("not materialized: exact size {} exceeds node budget {}", e.exact_size(),
                                         config.node_budget);
  }
  report.wall_time_seconds = detail::seconds_since(start);
  result.population = std::move(outcome.population);
  result.best = outcome.best;
  return result;
}

RunReport run_gsgp(const EvolutionConfig& config, const Dataset& train, const Dataset& test) {
  return evolve_gsgp(config, train, test).report;
}

}  // namespace gsgp
