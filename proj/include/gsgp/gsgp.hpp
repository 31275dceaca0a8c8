#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "gsgp/bigint.hpp"
#include "gsgp/config.hpp"
#include "gsgp/data.hpp"
#include "gsgp/expr.hpp"
#include "gsgp/report.hpp"
#include "gsgp/rng.hpp"

namespace gsgp {

/// Extra nodes added by geometric mutation: +, x, delta, -.
inline constexpr unsigned kGsmExtraNodes = 4;
/// Extra nodes added by geometric crossover: +, x, k, x, (1-k) folded.
inline constexpr unsigned kGsxExtraNodes = 5;

struct Lineage;
using LineageRef = std::shared_ptr<const Lineage>;

struct InitialOrigin {
  Expr tree;
};

struct GsmOrigin {
  LineageRef parent;
  Expr r_m;
  Expr r_n;
  double delta;
};

struct GsxOrigin {
  LineageRef p1;
  LineageRef p2;
  double k;
};

/// Immutable node of the lineage DAG. Offspring point at their parents; no
/// tree is materialized during evolution.
struct Lineage {
  std::variant<InitialOrigin, GsmOrigin, GsxOrigin> origin;
  BigInt exact_size;
};

struct PointerIndividual {
  LineageRef lineage;
  Semantics train;
  Semantics test;
  double fitness;

  const BigInt& exact_size() const { return lineage->exact_size; }
};

/// Evaluation context: training and test inputs the cached semantics refer to.
class PointerContext {
 public:
  PointerContext(const Dataset& train, const Dataset& test);

  PointerIndividual initial(Expr tree) const;
  /// p + delta * (r_m - r_n), semantics propagated from the parent.
  PointerIndividual gsm(const PointerIndividual& parent, double delta, Expr r_m, Expr r_n) const;
  /// k * p1 + (1 - k) * p2.
  PointerIndividual gsx_e(const PointerIndividual& p1, const PointerIndividual& p2, double k) const;

  const Dataset& train() const noexcept { return *train_; }
  const Dataset& test() const noexcept { return *test_; }

 private:
  const Dataset* train_;
  const Dataset* test_;
};

/// Draws r_m then r_n with grow(max_depth). delta must be positive.
PointerIndividual gsm(const PointerContext& ctx, const PointerIndividual& parent, double delta, int max_depth,
                      Interval erc, Rng& rng);

/// Draws k ~ U[0, 1).
PointerIndividual gsx_e(const PointerContext& ctx, const PointerIndividual& p1, const PointerIndividual& p2,
                        Rng& rng);

/// Materializes the full expression. Mutation nodes become
/// p + delta * (r_m - r_n) and crossover nodes k * p1 + (1 - k) * p2 with the
/// complement folded into one constant. Shared ancestors are shared in the
/// result, so node_count() is exact without the tree being expanded in
/// memory. Throws BudgetError when exact_size exceeds node_budget.
Expr reconstruct(const PointerIndividual& individual, std::uint64_t node_budget);
Expr reconstruct(const LineageRef& lineage, std::uint64_t node_budget);

struct GsgpResult {
  RunReport report;
  std::vector<PointerIndividual> population;
  std::size_t best = 0;
};

using GsgpObserver = std::function<void(std::size_t generation, std::span<const PointerIndividual> population)>;

/// Pointer-based GSGP. The mutation step is ms_fraction times the training
/// target std, fixed for the run. Test semantics are propagated for every
/// individual.
GsgpResult evolve_gsgp(const EvolutionConfig& config, const Dataset& train, const Dataset& test,
                       const GsgpObserver& observer = {});

RunReport run_gsgp(const EvolutionConfig& config, const Dataset& train, const Dataset& test);

}  // namespace gsgp
