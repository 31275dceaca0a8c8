#include "gsgp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "gsgp/errors.hpp"
#include "gsgp/gp.hpp"
#include "gsgp/gsgp.hpp"
#include "gsgp/red.hpp"

namespace gsgp {

void SuiteConfig::validate() const {
  if (datasets.empty()) throw ConfigError("suite needs at least one dataset");
  if (engines.empty()) throw ConfigError("suite needs at least one engine");
  if (folds < 2) throw ConfigError("suite needs folds >= 2");
  if (repeats < 1) throw ConfigError("suite needs repeats >= 1");
  if (workers < 1) throw ConfigError("suite needs workers >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  gp.validate();
  geometric.validate();
}

EvolutionConfig SuiteConfig::engine_config(EngineKind kind) const {
  return kind == EngineKind::Gp ? gp : geometric;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <class T>
T parse_value(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    T out{};
    if constexpr (std::is_same_v<T, double>) {
      out = std::stod(value, &used);
    } else {
      if (!value.empty() && value.front() == '-') throw std::invalid_argument("negative");
      out = static_cast<T>(std::stoull(value, &used));
    }
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("invalid value '{}' for '{}'", value, key));
  }
}

}  // namespace

SuiteConfig parse_suite_config(const std::string& text) {
  SuiteConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto both = [&](auto setter) {
    setter(config.gp);
    setter(config.geometric);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "datasets") {
      config.datasets = split_list(value);
    } else if (key == "engines") {
      config.engines.clear();
      for (const auto& name : split_list(value)) config.engines.push_back(parse_engine(name));
    } else if (key == "folds") {
      config.folds = parse_value<std::size_t>(key, value);
    } else if (key == "repeats") {
      config.repeats = parse_value<std::size_t>(key, value);
    } else if (key == "base-seed") {
      config.base_seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "workers") {
      config.workers = parse_value<std::size_t>(key, value);
    } else if (key == "alpha") {
      config.alpha = parse_value<double>(key, value);
    } else if (key == "target-col") {
      if (value != "last") config.target_column = parse_value<std::size_t>(key, value);
    } else if (key == "pop") {
      const auto v = parse_value<std::size_t>(key, value);
      both([&](auto& c) { c.pop_size = v; });
    } else if (key == "gens") {
      const auto v = parse_value<std::size_t>(key, value);
      both([&](auto& c) { c.generations = v; });
    } else if (key == "max-depth") {
      const auto v = static_cast<int>(parse_value<std::size_t>(key, value));
      both([&](auto& c) { c.max_depth = v; });
    } else if (key == "erc-lo") {
      const auto v = parse_value<double>(key, value);
      both([&](auto& c) { c.erc.lo = v; });
    } else if (key == "erc-hi") {
      const auto v = parse_value<double>(key, value);
      both([&](auto& c) { c.erc.hi = v; });
    } else if (key == "ms-fraction") {
      const auto v = parse_value<double>(key, value);
      both([&](auto& c) { c.ms_fraction = v; });
    } else if (key == "node-budget") {
      const auto v = parse_value<std::uint64_t>(key, value);
      both([&](auto& c) { c.node_budget = v; });
    } else if (key == "gp.tournament") {
      config.gp.tournament_size = parse_value<std::size_t>(key, value);
    } else if (key == "gp.p-xover") {
      config.gp.p_crossover = parse_value<double>(key, value);
    } else if (key == "gp.p-mut") {
      config.gp.p_mutation = parse_value<double>(key, value);
    } else if (key == "gsgp.tournament") {
      config.geometric.tournament_size = parse_value<std::size_t>(key, value);
    } else if (key == "gsgp.p-xover") {
      config.geometric.p_crossover = parse_value<double>(key, value);
    } else if (key == "gsgp.p-mut") {
      config.geometric.p_mutation = parse_value<double>(key, value);
    } else {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
  }
  return config;
}

SuiteConfig load_suite_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open suite config '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_suite_config(buffer.str());
}

std::uint64_t run_seed(std::uint64_t base_seed, std::size_t dataset, std::size_t fold, std::size_t repeat) {
  return derive_seed(base_seed, {dataset, fold, repeat});
}

std::string_view marker_name(Marker m) noexcept {
  switch (m) {
    case Marker::Better: return "better";
    case Marker::Worse: return "worse";
    case Marker::Indistinguishable: return "indistinguishable";
  }
  return "?";
}

std::string_view marker_symbol(Marker m) noexcept {
  switch (m) {
    case Marker::Better: return "▲";
    case Marker::Worse: return "▼";
    case Marker::Indistinguishable: return "♦";
  }
  return "?";
}

namespace {

struct Job {
  std::size_t dataset;
  EngineKind engine;
  std::size_t fold;
  std::size_t repeat;
};

struct LoadedDataset {
  std::string name;
  Dataset data;
  FoldAssignment folds;
};

RunRecord execute(const Job& job, const LoadedDataset& ds, const SuiteConfig& suite) {
  RunRecord record;
  record.dataset = ds.name;
  record.engine = job.engine;
  record.fold = job.fold;
  record.repeat = job.repeat;
  record.seed = run_seed(suite.base_seed, job.dataset, job.fold, job.repeat);
  try {
    const auto train_rows = ds.folds.train_rows(job.fold);
    const auto test_rows = ds.folds.test_rows(job.fold);
    const auto train = ds.data.subset(train_rows);
    const auto test = ds.data.subset(test_rows);
    auto config = suite.engine_config(job.engine);
    config.seed = record.seed;
    RunReport report;
    switch (job.engine) {
      case EngineKind::Gp: report = run_gp(config, train, test); break;
      case EngineKind::Gsgp: report = run_gsgp(config, train, test); break;
      case EngineKind::GsgpRed: report = run_gsgp_red(config, train, test); break;
    }
    record.train_rmse = report.final_train_rmse;
    record.test_rmse = report.final_test_rmse;
    record.size = parse_decimal(report.best_size);
    record.wall_time_seconds = report.wall_time_seconds;
    record.ok = true;
  } catch (const std::exception& e) {
    record.error = e.what();
  }
  return record;
}

Marker to_marker(const WilcoxonResult& w) {
  if (!w.reject) return Marker::Indistinguishable;
  return w.direction < 0 ? Marker::Better : Marker::Worse;
}

}  // namespace

SuiteReport run_suite(const SuiteConfig& config) {
  config.validate();
  SuiteReport report;
  report.workers = config.workers;
  report.folds = config.folds;
  report.repeats = config.repeats;

  std::vector<std::optional<LoadedDataset>> loaded;
  for (std::size_t i = 0; i < config.datasets.size(); ++i) {
    try {
      auto data = load_dataset(config.datasets[i], config.target_column);
      auto folds = kfold_split(data, config.folds, derive_seed(config.base_seed, {i, 0xf01dULL}));
      auto name = data.name;
      loaded.emplace_back(LoadedDataset{std::move(name), std::move(data), std::move(folds)});
    } catch (const std::exception& e) {
      report.dataset_failures.push_back({config.datasets[i], e.what()});
      loaded.emplace_back(std::nullopt);
    }
  }

  std::vector<Job> jobs;
  for (std::size_t d = 0; d < loaded.size(); ++d) {
    if (!loaded[d]) continue;
    for (auto engine : config.engines)
      for (std::size_t f = 0; f < config.folds; ++f)
        for (std::size_t r = 0; r < config.repeats; ++r) jobs.push_back({d, engine, f, r});
  }

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) records[j] = execute(jobs[j], *loaded[jobs[j].dataset], config);
  };
  const auto threads = std::min(config.workers, std::max<std::size_t>(jobs.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  // Summaries per (dataset, engine), keyed by job order.
  for (std::size_t d = 0; d < loaded.size(); ++d) {
    if (!loaded[d]) continue;
    std::map<std::pair<std::size_t, std::size_t>, const RunRecord*> by_cell[3];
    for (auto engine : config.engines) {
      EngineSummary summary;
      summary.dataset = loaded[d]->name;
      summary.engine = engine;
      std::vector<double> train, test, times;
      std::vector<BigInt> sizes;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].dataset != d || jobs[j].engine != engine) continue;
        const auto& rec = records[j];
        if (!rec.ok) {
          ++summary.failed;
          continue;
        }
        ++summary.completed;
        train.push_back(rec.train_rmse);
        test.push_back(rec.test_rmse);
        times.push_back(rec.wall_time_seconds);
        sizes.push_back(rec.size);
        by_cell[static_cast<int>(engine)][{rec.fold, rec.repeat}] = &rec;
      }
      if (summary.completed > 0) {
        summary.median_train_rmse = median(train);
        summary.median_test_rmse = median(test);
        summary.median_wall_time = median(times);
        summary.median_size = median_decimal(sizes);
      }
      report.summaries.push_back(std::move(summary));
    }

    const auto& red_cells = by_cell[static_cast<int>(EngineKind::GsgpRed)];
    if (red_cells.empty()) continue;
    for (auto comparator : config.engines) {
      if (comparator == EngineKind::GsgpRed) continue;
      const auto& other = by_cell[static_cast<int>(comparator)];
      for (const std::string metric : {"test_rmse", "size", "wall_time"}) {
        std::vector<double> x, y;
        for (const auto& [cell, red] : red_cells) {
          const auto it = other.find(cell);
          if (it == other.end()) continue;
          auto value = [&](const RunRecord& r) {
            if (metric == "test_rmse") return r.test_rmse;
            if (metric == "size") return to_double(r.size);
            return r.wall_time_seconds;
          };
          x.push_back(value(*red));
          y.push_back(value(*it->second));
        }
        Comparison c{loaded[d]->name, comparator, metric, wilcoxon_signed_rank(x, y, config.alpha)};
        c.marker = to_marker(c.test);
        report.comparisons.push_back(std::move(c));
      }
    }
  }
  report.runs = std::move(records);
  return report;
}

namespace {

nlohmann::json real_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const SuiteReport& report) {
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"dataset", s.dataset},
                         {"engine", engine_name(s.engine)},
                         {"completed", s.completed},
                         {"failed", s.failed},
                         {"median_train_rmse", real_or_null(s.median_train_rmse)},
                         {"median_test_rmse", real_or_null(s.median_test_rmse)},
                         {"median_size", s.median_size},
                         {"median_wall_time_seconds", s.median_wall_time}});
  }
  nlohmann::json comparisons = nlohmann::json::array();
  for (const auto& c : report.comparisons) {
    comparisons.push_back({{"dataset", c.dataset},
                           {"engine", "gsgp-red"},
                           {"comparator", engine_name(c.comparator)},
                           {"metric", c.metric},
                           {"n", c.test.n},
                           {"w_plus", c.test.w_plus},
                           {"w_minus", c.test.w_minus},
                           {"statistic", c.test.statistic},
                           {"exact", c.test.exact},
                           {"inconclusive", c.test.inconclusive},
                           {"reject", c.test.reject},
                           {"outcome", marker_name(c.marker)}});
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"dataset", r.dataset},
                    {"engine", engine_name(r.engine)},
                    {"fold", r.fold},
                    {"repeat", r.repeat},
                    {"seed", r.seed},
                    {"ok", r.ok},
                    {"error", r.ok ? nlohmann::json(nullptr) : nlohmann::json(r.error)},
                    {"train_rmse", real_or_null(r.train_rmse)},
                    {"test_rmse", real_or_null(r.test_rmse)},
                    {"size", to_decimal(r.size)},
                    {"wall_time_seconds", r.wall_time_seconds}});
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.dataset_failures) failures.push_back({{"dataset", f.dataset}, {"error", f.error}});
  return nlohmann::json{{"schema_version", kReportSchemaVersion},
                        {"folds", report.folds},
                        {"repeats", report.repeats},
                        {"workers", report.workers},
                        {"summaries", std::move(summaries)},
                        {"comparisons", std::move(comparisons)},
                        {"runs", std::move(runs)},
                        {"dataset_failures", std::move(failures)}};
}

namespace {

std::string marker_for(const SuiteReport& report, const std::string& dataset, EngineKind comparator,
                       const std::string& metric) {
  for (const auto& c : report.comparisons) {
    if (c.dataset == dataset && c.comparator == comparator && c.metric == metric) {
      return std::string(marker_symbol(c.marker));
    }
  }
  return "";
}

std::string table(const SuiteReport& report, const std::string& title, const std::string& metric,
                  const std::function<std::string(const EngineSummary&)>& cell) {
  std::vector<std::string> datasets;
  std::vector<EngineKind> engines;
  for (const auto& s : report.summaries) {
    if (std::find(datasets.begin(), datasets.end(), s.dataset) == datasets.end()) datasets.push_back(s.dataset);
    if (std::find(engines.begin(), engines.end(), s.engine) == engines.end()) engines.push_back(s.engine);
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"dataset"};
  for (auto e : engines) header.emplace_back(engine_name(e));
  rows.push_back(header);
  for (const auto& d : datasets) {
    std::vector<std::string> row{d};
    for (auto e : engines) {
      std::string text = "-";
      for (const auto& s : report.summaries) {
        if (s.dataset == d && s.engine == e && s.completed > 0) text = cell(s);
      }
      if (e != EngineKind::GsgpRed) {
        const auto m = marker_for(report, d, e, metric);
        if (!m.empty()) text += " " + m;
      }
      row.push_back(text);
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  auto display_width = [](const std::string& s) {
    // count UTF-8 code points so the markers align
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  };
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], display_width(row[c]));
  std::string out = title + "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out += std::string(widths[c] - display_width(row[c]) + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string to_text_tables(const SuiteReport& report) {
  std::string out;
  out += table(report, "Median train RMSE of the best individual", "", [](const EngineSummary& s) {
    return fmt::format("{:.6g}", s.median_train_rmse);
  });
  out += '\n';
  out += table(report, "Median test RMSE of the best individual", "test_rmse", [](const EngineSummary& s) {
    return fmt::format("{:.6g}", s.median_test_rmse);
  });
  out += '\n';
  out += table(report, "Median size of the best individual (nodes)", "size", [](const EngineSummary& s) {
    return s.median_size.size() > 12 ? fmt::format("{:.3e}", to_double(parse_decimal(s.median_size.substr(
                                                               0, s.median_size.find('.')))))
                                     : s.median_size;
  });
  out += '\n';
  out += table(report, "Median wall time (seconds)", "wall_time", [](const EngineSummary& s) {
    return fmt::format("{:.3f}", s.median_wall_time);
  });
  out += fmt::format("\nMarkers compare gsgp-red against the column's engine (Wilcoxon signed-rank, paired):\n"
                     "  {} gsgp-red better   {} gsgp-red worse   {} indistinguishable\n"
                     "Workers: {}\n",
                     marker_symbol(Marker::Better), marker_symbol(Marker::Worse),
                     marker_symbol(Marker::Indistinguishable), report.workers);
  for (const auto& f : report.dataset_failures) out += fmt::format("Dataset '{}' aborted: {}\n", f.dataset, f.error);
  return out;
}

double relative_deviation(double a, double b) {
  if (a == b) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b)) return HUGE_VAL;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

EquivalenceReport verify_equivalence(std::uint64_t seed, EvolutionConfig config, const Dataset& train,
                                     const Dataset& test) {
  config.seed = seed;
  const auto pointer = evolve_gsgp(config, train, test);
  const auto reduced = evolve_gsgp_red(config, train, test);

  EquivalenceReport out;
  out.generations = config.generations;
  const auto& a = pointer.report.trace;
  const auto& b = reduced.report.trace;
  for (std::size_t g = 0; g < a.size() && g < b.size(); ++g) {
    const double dev = relative_deviation(a[g].best_train_rmse, b[g].best_train_rmse);
    out.trace_deviation.push_back(dev);
    out.max_trace_deviation = std::max(out.max_trace_deviation, dev);
    if (dev > kEquivalenceTolerance && !out.first_divergent_generation) out.first_divergent_generation = g;
  }
  if (a.size() != b.size()) {
    out.max_trace_deviation = HUGE_VAL;
    if (!out.first_divergent_generation) out.first_divergent_generation = std::min(a.size(), b.size());
  }

  const auto& best_pointer = pointer.population[pointer.best];
  const auto& best_reduced = reduced.population[reduced.best];
  const auto recomputed = red_semantics(best_reduced, train.features);
  for (std::size_t i = 0; i < best_pointer.train.size(); ++i) {
    out.max_semantics_deviation =
        std::max(out.max_semantics_deviation, relative_deviation(best_pointer.train[i], best_reduced.train[i]));
    out.max_recomputed_deviation =
        std::max(out.max_recomputed_deviation, relative_deviation(best_pointer.train[i], recomputed[i]));
  }
  out.gsgp_size = to_decimal(best_pointer.exact_size());
  out.red_size = red_node_count(best_reduced);
  out.red_terms = best_reduced.term_count();
  out.size_log10_gap = log10_of(best_pointer.exact_size()) - std::log10(static_cast<double>(out.red_size));
  out.warning = out.max_trace_deviation > kEquivalenceTolerance || out.max_semantics_deviation > kEquivalenceTolerance;
  out.passed =
      out.max_trace_deviation <= kEquivalenceHardLimit && out.max_semantics_deviation <= kEquivalenceHardLimit;
  return out;
}

nlohmann::json to_json(const EquivalenceReport& r) {
  return nlohmann::json{
      {"schema_version", kReportSchemaVersion},
      {"generations", r.generations},
      {"max_trace_deviation", r.max_trace_deviation},
      {"trace_deviation", r.trace_deviation},
      {"first_divergent_generation",
       r.first_divergent_generation ? nlohmann::json(*r.first_divergent_generation) : nlohmann::json(nullptr)},
      {"max_semantics_deviation", r.max_semantics_deviation},
      {"max_recomputed_deviation", r.max_recomputed_deviation},
      {"gsgp_size", r.gsgp_size},
      {"gsgp_red_size", r.red_size},
      {"gsgp_red_terms", r.red_terms},
      {"size_log10_gap", r.size_log10_gap},
      {"warning", r.warning},
      {"passed", r.passed}};
}

}  // namespace gsgp
