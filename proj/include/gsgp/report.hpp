#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsgp/config.hpp"

namespace gsgp {

inline constexpr int kReportSchemaVersion = 1;

/// Best-of-generation snapshot. Generation 0 is the initial population.
struct GenerationRecord {
  std::size_t generation = 0;
  double best_train_rmse = 0.0;
  /// Node count of the best individual as a decimal string.
  std::string best_size;
  double elapsed_seconds = 0.0;
};

struct RunReport {
  std::string engine;
  std::string dataset;
  EvolutionConfig config;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t num_features = 0;
  /// Columns of the source file including the target; 0 when synthetic.
  std::size_t source_columns = 0;
  /// Geometric mutation step (0 for GP).
  double mutation_step = 0.0;
  std::vector<GenerationRecord> trace;

  double final_train_rmse = 0.0;
  double final_test_rmse = 0.0;
  std::string best_size;
  /// Distinct terms of the best GSGP-Red individual.
  std::optional<std::size_t> term_count;
  std::optional<std::string> best_prefix;
  std::optional<std::string> best_infix;
  /// Why the expression was not rendered (e.g. over the node budget).
  std::optional<std::string> expression_note;
  double wall_time_seconds = 0.0;
};

/// Non-finite RMSE values are written as null.
nlohmann::json to_json(const RunReport& report);

/// Same as to_json with every wall/elapsed time field removed; two runs with
/// the same seed produce identical values.
nlohmann::json to_json_without_times(const RunReport& report);

}  // namespace gsgp
