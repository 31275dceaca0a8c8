#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "gsgp/expr.hpp"

namespace gsgp {

enum class EngineKind { Gp, Gsgp, GsgpRed };

std::string_view engine_name(EngineKind kind) noexcept;
/// Accepts "gp", "gsgp", "gsgp-red"; throws ConfigError otherwise.
EngineKind parse_engine(std::string_view name);

/// Parameters shared by the three engines. Defaults follow the published
/// protocol: 1000 individuals, 250 generations, depth 6, ERC in [-1, 1],
/// tournament 7 with 0.9/0.1 subtree operators for GP and tournament 10 with
/// 0.5/0.5 geometric operators for GSGP and GSGP-Red.
struct EvolutionConfig {
  std::size_t pop_size = 1000;
  std::size_t generations = 250;
  std::size_t tournament_size = 7;
  double p_crossover = 0.9;
  double p_mutation = 0.1;
  /// Depth bound for the initial population, GP mutation subtrees and the
  /// random functions of geometric mutation.
  int max_depth = 6;
  Interval erc{-1.0, 1.0};
  /// Geometric mutation step as a fraction of the training target std.
  double ms_fraction = 0.1;
  std::uint64_t seed = 0;
  /// Largest GSGP individual that will be materialized for reporting.
  std::uint64_t node_budget = 100000;

  static EvolutionConfig defaults(EngineKind kind);

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

nlohmann::json to_json(const EvolutionConfig& config);

}  // namespace gsgp
