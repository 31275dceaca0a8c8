#include "gsgp/red.hpp"

#include <string_view>

#include <fmt/format.h>

#include "gsgp/detail/geometric_loop.hpp"
#include "gsgp/errors.hpp"

namespace gsgp {

FunctionRef FunctionStore::intern(const Expr& tree, Provenance provenance) {
  auto key = canonical_key(tree);
  if (auto it = by_key_.find(key); it != by_key_.end()) return it->second;
  std::optional<std::size_t> initial_index;
  if (provenance == Provenance::Initial) initial_index = initial_count_++;
  auto stored = std::make_shared<const StoredFunction>(StoredFunction{key, tree, provenance, initial_index});
  by_key_.emplace(std::move(key), stored);
  return stored;
}

RedContext::RedContext(const Dataset& train) : train_(&train) {}

LinearIndividual RedContext::lift_initial(const Expr& tree) {
  LinearIndividual out;
  out.terms.push_back({store_.intern(tree, Provenance::Initial), 1.0});
  out.train = raw_semantics(tree, train_->features);
  out.fitness = fitness_from_semantics(out.train, train_->target);
  return out;
}

LinearIndividual RedContext::expand_gsm(const LinearIndividual& parent, double delta, const Expr& r_m,
                                        const Expr& r_n) {
  if (!(delta > 0.0)) throw std::invalid_argument("geometric mutation step must be positive");
  LinearIndividual out;
  out.terms = parent.terms;
  out.terms.reserve(parent.terms.size() + 2);
  out.terms.push_back({store_.intern(r_m, Provenance::Random), delta});
  out.terms.push_back({store_.intern(r_n, Provenance::Random), -delta});
  detail::gsm_kernel(parent.train, delta, raw_semantics(r_m, train_->features), raw_semantics(r_n, train_->features),
                     out.train);
  out.fitness = fitness_from_semantics(out.train, train_->target);
  return out;
}

LinearIndividual RedContext::expand_gsx(const LinearIndividual& p1, const LinearIndividual& p2, double k) const {
  if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("crossover weight must lie in [0, 1]");
  const double k_complement = 1.0 - k;
  LinearIndividual out;
  out.terms.reserve(p1.terms.size() + p2.terms.size());
  for (const auto& t : p1.terms) out.terms.push_back({t.function, k * t.coefficient});
  for (const auto& t : p2.terms) out.terms.push_back({t.function, k_complement * t.coefficient});
  detail::gsx_kernel(p1.train, p2.train, k, out.train);
  out.fitness = fitness_from_semantics(out.train, train_->target);
  return out;
}

LinearIndividual aggregate(LinearIndividual individual) {
  std::unordered_map<std::string_view, std::size_t> position;
  position.reserve(individual.terms.size());
  std::vector<Term> merged;
  merged.reserve(individual.terms.size());
  for (auto& term : individual.terms) {
    const auto [it, inserted] = position.try_emplace(term.key(), merged.size());
    if (inserted) {
      merged.push_back(std::move(term));
    } else {
      merged[it->second].coefficient += term.coefficient;
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coefficient == 0.0; });
  individual.terms = std::move(merged);
  return individual;
}

Semantics red_semantics(const LinearIndividual& individual, const Matrix& inputs) {
  Semantics out(inputs.rows(), 0.0);
  for (const auto& term : individual.terms) {
    const auto values = raw_semantics(term.function->tree, inputs);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += term.coefficient * values[i];
  }
  return out;
}

std::uint64_t red_node_count(const LinearIndividual& individual) {
  if (individual.terms.empty()) return 1;
  std::uint64_t total = individual.terms.size() - 1;
  for (const auto& term : individual.terms) total += term.function->tree.node_count() + 2;
  return total;
}

Expr to_expression(const LinearIndividual& individual) {
  if (individual.terms.empty()) return Expr::constant(0.0);
  auto product = [](const Term& t) { return Expr::mul(Expr::constant(t.coefficient), t.function->tree); };
  Expr sum = product(individual.terms.front());
  for (std::size_t i = 1; i < individual.terms.size(); ++i) sum = Expr::add(std::move(sum), product(individual.terms[i]));
  return sum;
}

nlohmann::json term_table_json(const LinearIndividual& individual) {
  auto table = nlohmann::json::array();
  for (const auto& t : individual.terms) {
    table.push_back({{"coefficient", t.coefficient},
                     {"key", t.key()},
                     {"infix", to_infix(t.function->tree)},
                     {"provenance", t.function->provenance == Provenance::Initial ? "initial" : "random"}});
  }
  return table;
}

namespace {

struct RedOps {
  RedContext& ctx;

  LinearIndividual initial(Expr tree) { return ctx.lift_initial(tree); }
  LinearIndividual mutate(const LinearIndividual& p, double delta, Expr r_m, Expr r_n) {
    return aggregate(ctx.expand_gsm(p, delta, r_m, r_n));
  }
  LinearIndividual crossover(const LinearIndividual& a, const LinearIndividual& b, double k) {
    return aggregate(ctx.expand_gsx(a, b, k));
  }
  double fitness(const LinearIndividual& p) const { return p.fitness; }
  std::string size_string(const LinearIndividual& p) const { return std::to_string(red_node_count(p)); }
};

}  // namespace

RedResult evolve_gsgp_red(const EvolutionConfig& config, const Dataset& train, const Dataset& test,
                          const RedObserver& observer) {
  config.validate();
  if (train.num_features() != test.num_features()) {
    throw ConfigError("training and test sets have different feature counts");
  }
  const auto start = detail::Clock::now();
  RedContext ctx(train);
  const double delta = detail::mutation_step(config, train);

  RedResult result;
  auto& report = result.report;
  report.engine = "gsgp-red";
  report.dataset = train.name;
  report.config = config;
  report.n_train = train.size();
  report.source_columns = train.source_columns;
  report.n_test = test.size();
  report.num_features = train.num_features();
  report.mutation_step = delta;

  RedOps ops{ctx};
  auto outcome = detail::evolve_geometric(config, train, delta, ops, report, start, observer);

  const auto& winner = outcome.population[outcome.best];
  report.final_train_rmse = winner.fitness;
  report.final_test_rmse = fitness_from_semantics(red_semantics(winner, test.features), test.target);
  report.best_size = std::to_string(red_node_count(winner));
  report.term_count = winner.term_count();
  const auto tree = to_expression(winner);
  report.best_prefix = canonical_key(tree);
  report.best_infix = to_infix(tree);
  report.wall_time_seconds = detail::seconds_since(start);
  result.population = std::move(outcome.population);
  result.best = outcome.best;
  result.stored_functions = ctx.store().size();
  result.initial_functions = ctx.store().initial_count();
  return result;
}

RunReport run_gsgp_red(const EvolutionConfig& config, const Dataset& train, const Dataset& test) {
  return evolve_gsgp_red(config, train, test).report;
}

}  // namespace gsgp
