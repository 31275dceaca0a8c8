#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "gsgp/config.hpp"
#include "gsgp/data.hpp"
#include "gsgp/expr.hpp"
#include "gsgp/report.hpp"
#include "gsgp/selection.hpp"

namespace gsgp {

/// Where a stored function came from: the initial population or a random
/// tree drawn by geometric mutation.
enum class Provenance : std::uint8_t { Initial, Random };

struct StoredFunction {
  std::string key;
  Expr tree;
  Provenance provenance;
  /// Position in the initial population for Initial functions.
  std::optional<std::size_t> initial_index;
};

using FunctionRef = std::shared_ptr<const StoredFunction>;

/// One stored copy per distinct tree (by canonical key) for a whole run. A
/// random tree identical to an already stored one resolves to the stored copy
/// and keeps its original provenance.
class FunctionStore {
 public:
  FunctionRef intern(const Expr& tree, Provenance provenance);
  std::size_t size() const noexcept { return by_key_.size(); }
  std::size_t initial_count() const noexcept { return initial_count_; }

 private:
  std::unordered_map<std::string, FunctionRef> by_key_;
  std::size_t initial_count_ = 0;
};

struct Term {
  FunctionRef function;
  double coefficient;

  const std::string& key() const { return function->key; }
};

/// Sum of coefficient * function over an insertion-ordered term table.
/// After aggregation keys are unique and no coefficient is exactly zero.
struct LinearIndividual {
  std::vector<Term> terms;
  Semantics train;
  double fitness = kWorstFitness;

  std::size_t term_count() const noexcept { return terms.size(); }
};

/// Builds linear individuals against one training set and function store.
class RedContext {
 public:
  explicit RedContext(const Dataset& train);

  /// p = 1 * p.
  LinearIndividual lift_initial(const Expr& tree);

  /// Parent terms followed by (+delta, r_m) and (-delta, r_n). Semantics are
  /// propagated from the parent; the result is not aggregated.
  LinearIndividual expand_gsm(const LinearIndividual& parent, double delta, const Expr& r_m, const Expr& r_n);

  /// p1 terms scaled by k followed by p2 terms scaled by (1 - k). Not
  /// aggregated.
  LinearIndividual expand_gsx(const LinearIndividual& p1, const LinearIndividual& p2, double k) const;

  FunctionStore& store() noexcept { return store_; }
  const FunctionStore& store() const noexcept { return store_; }
  const Dataset& train() const noexcept { return *train_; }

 private:
  const Dataset* train_;
  FunctionStore store_;
  std::size_t next_initial_ = 0;
};

/// Merges terms with equal keys into the first occurrence (coefficients summed
/// in table order) and drops terms whose coefficient is exactly zero.
/// Semantics are carried over untouched.
LinearIndividual aggregate(LinearIndividual individual);

/// Sum over terms, in table order, of coefficient * semantics(function).
/// Overflow is left as non-finite values.
Semantics red_semantics(const LinearIndividual& individual, const Matrix& inputs);

/// Nodes of the flattened left-deep sum of coefficient * function products:
/// sum(node_count(f) + 2) + (s - 1). An empty table renders as the constant 0
/// and counts 1.
std::uint64_t red_node_count(const LinearIndividual& individual);

/// The flattened expression ((c1 * f1 + c2 * f2) + c3 * f3) + ...
Expr to_expression(const LinearIndividual& individual);

/// [{"coefficient", "key", "infix"}, ...] for external simplifiers.
nlohmann::json term_table_json(const LinearIndividual& individual);

struct RedResult {
  RunReport report;
  std::vector<LinearIndividual> population;
  std::size_t best = 0;
  /// Function store statistics at the end of the run.
  std::size_t stored_functions = 0;
  std::size_t initial_functions = 0;
};

using RedObserver = std::function<void(std::size_t generation, std::span<const LinearIndividual> population)>;

/// GSGP-Red: same skeleton and random stream as evolve_gsgp; every offspring
/// is expanded and then aggregated. Test RMSE is computed once, for the final
/// best individual.
RedResult evolve_gsgp_red(const EvolutionConfig& config, const Dataset& train, const Dataset& test,
                          const RedObserver& observer = {});

RunReport run_gsgp_red(const EvolutionConfig& config, const Dataset& train, const Dataset& test);

}  // namespace gsgp
