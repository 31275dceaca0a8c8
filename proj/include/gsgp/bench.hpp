#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsgp/bigint.hpp"
#include "gsgp/config.hpp"
#include "gsgp/data.hpp"
#include "gsgp/stats.hpp"

namespace gsgp {

/// Cross-validated experiment description. Every engine runs
/// folds x repeats times per dataset; gsgp and gsgp-red share seeds.
struct SuiteConfig {
  /// CSV paths or "synthetic:<problem>[:n[:noise]]".
  std::vector<std::string> datasets;
  std::optional<std::size_t> target_column;
  std::vector<EngineKind> engines{EngineKind::Gp, EngineKind::Gsgp, EngineKind::GsgpRed};
  std::size_t folds = 5;
  std::size_t repeats = 6;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  double alpha = 0.05;
  EvolutionConfig gp = EvolutionConfig::defaults(EngineKind::Gp);
  EvolutionConfig geometric = EvolutionConfig::defaults(EngineKind::Gsgp);

  /// Throws ConfigError.
  void validate() const;
  EvolutionConfig engine_config(EngineKind kind) const;
};

/// Parses flat "key = value" lines ('#' starts a comment). Keys:
///   datasets, engines (comma separated), folds, repeats, base-seed, workers,
///   alpha, target-col, pop, gens, max-depth, erc-lo, erc-hi, ms-fraction,
///   node-budget, and per-family gp.tournament, gp.p-xover, gp.p-mut,
///   gsgp.tournament, gsgp.p-xover, gsgp.p-mut.
/// Unknown keys and malformed values throw ConfigError.
SuiteConfig parse_suite_config(const std::string& text);
SuiteConfig load_suite_config(const std::filesystem::path& path);

/// Seed of one (dataset, fold, repeat) cell. Engine independent.
std::uint64_t run_seed(std::uint64_t base_seed, std::size_t dataset, std::size_t fold, std::size_t repeat);

struct RunRecord {
  std::string dataset;
  EngineKind engine;
  std::size_t fold = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  BigInt size;
  double wall_time_seconds = 0.0;
};

struct EngineSummary {
  std::string dataset;
  EngineKind engine;
  std::size_t completed = 0;
  std::size_t failed = 0;
  double median_train_rmse = 0.0;
  double median_test_rmse = 0.0;
  std::string median_size;
  double median_wall_time = 0.0;
};

/// Outcome for gsgp-red against a comparator; lower values are better.
enum class Marker { Better, Worse, Indistinguishable };

std::string_view marker_name(Marker m) noexcept;
std::string_view marker_symbol(Marker m) noexcept;

struct Comparison {
  std::string dataset;
  EngineKind comparator;
  /// "test_rmse", "size" or "wall_time".
  std::string metric;
  WilcoxonResult test;
  Marker marker = Marker::Indistinguishable;
};

struct DatasetFailure {
  std::string dataset;
  std::string error;
};

struct SuiteReport {
  std::vector<EngineSummary> summaries;
  std::vector<Comparison> comparisons;
  std::vector<RunRecord> runs;
  std::vector<DatasetFailure> dataset_failures;
  std::size_t workers = 1;
  std::size_t folds = 0;
  std::size_t repeats = 0;
};

/// Runs every (dataset, engine, fold, repeat) cell, up to `workers` at a
/// time, then aggregates in (dataset, engine, fold, repeat) order.
SuiteReport run_suite(const SuiteConfig& config);

nlohmann::json to_json(const SuiteReport& report);
/// Column-aligned RMSE, size and time tables with better/worse/equal markers.
std::string to_text_tables(const SuiteReport& report);

inline constexpr double kEquivalenceTolerance = 1e-9;
inline constexpr double kEquivalenceHardLimit = 1e-6;

/// |a - b| / max(|a|, |b|); 0 when a == b (including equal infinities).
double relative_deviation(double a, double b);

struct EquivalenceReport {
  std::size_t generations = 0;
  std::vector<double> trace_deviation;
  double max_trace_deviation = 0.0;
  /// First generation whose deviation exceeds kEquivalenceTolerance.
  std::optional<std::size_t> first_divergent_generation;
  /// Cached training semantics of the two final best individuals.
  double max_semantics_deviation = 0.0;
  /// GSGP cached semantics against the GSGP-Red dot product recomputed from
  /// its term table; differs only by summation order.
  double max_recomputed_deviation = 0.0;
  std::string gsgp_size;
  std::uint64_t red_size = 0;
  std::size_t red_terms = 0;
  /// log10(gsgp size) - log10(gsgp-red size).
  double size_log10_gap = 0.0;
  bool warning = false;
  bool passed = true;
};

/// Runs GSGP and GSGP-Red with the same seed and compares them.
EquivalenceReport verify_equivalence(std::uint64_t seed, EvolutionConfig config, const Dataset& train,
                                     const Dataset& test);

nlohmann::json to_json(const EquivalenceReport& report);

}  // namespace gsgp
