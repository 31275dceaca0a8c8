#include "gsgp/report.hpp"

#include <cmath>

namespace gsgp {

namespace {

nlohmann::json real_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& g : r.trace) {
    trace.push_back({{"generation", g.generation},
                     {"best_train_rmse", real_or_null(g.best_train_rmse)},
                     {"best_size", g.best_size},
                     {"elapsed_seconds", g.elapsed_seconds}});
  }
  return nlohmann::json{{"schema_version", kReportSchemaVersion},
                        {"engine", r.engine},
                        {"dataset", r.dataset},
                        {"config", to_json(r.config)},
                        {"n_train", r.n_train},
                        {"n_test", r.n_test},
                        {"num_features", r.num_features},
                        {"source_columns", r.source_columns},
                        {"mutation_step", r.mutation_step},
                        {"trace", std::move(trace)},
                        {"final",
                         {{"train_rmse", real_or_null(r.final_train_rmse)},
                          {"test_rmse", real_or_null(r.final_test_rmse)},
                          {"size", r.best_size},
                          {"term_count", optional_json(r.term_count)},
                          {"prefix", optional_json(r.best_prefix)},
                          {"infix", optional_json(r.best_infix)},
                          {"expression_note", optional_json(r.expression_note)}}},
                        {"wall_time_seconds", r.wall_time_seconds}};
}

nlohmann::json to_json_without_times(const RunReport& report) {
  auto j = to_json(report);
  j.erase("wall_time_seconds");
  for (auto& g : j["trace"]) g.erase("elapsed_seconds");
  return j;
}

}  // namespace gsgp
