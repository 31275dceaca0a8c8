#include "gsgp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gsgp/bench.hpp"
#include "gsgp/config.hpp"
#include "gsgp/data.hpp"
#include "gsgp/errors.hpp"
#include "gsgp/gp.hpp"
#include "gsgp/growth.hpp"
#include "gsgp/gsgp.hpp"
#include "gsgp/red.hpp"
#include "gsgp/stats.hpp"

namespace gsgp {
namespace {

struct EvolutionFlags {
  std::optional<std::size_t> pop, gens, tournament;
  std::optional<double> p_xover, p_mut;
  std::optional<int> max_depth;
  std::optional<double> erc_lo, erc_hi, ms_fraction;
  std::optional<std::uint64_t> seed, node_budget;

  void add_to(CLI::App& app) {
    app.add_option("--pop", pop, "Population size");
    app.add_option("--gens", gens, "Generations");
    app.add_option("--tournament", tournament, "Tournament size");
    app.add_option("--p-xover", p_xover, "Crossover probability");
    app.add_option("--p-mut", p_mut, "Mutation probability");
    app.add_option("--max-depth", max_depth, "Initial and random-tree depth bound");
    app.add_option("--erc-lo", erc_lo, "Lower bound of ephemeral constants");
    app.add_option("--erc-hi", erc_hi, "Upper bound of ephemeral constants");
    app.add_option("--ms-fraction", ms_fraction, "Mutation step as a fraction of the target std");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--node-budget", node_budget, "Largest tree materialized for printing");
  }

  void apply(EvolutionConfig& c) const {
    if (pop) c.pop_size = *pop;
    if (gens) c.generations = *gens;
    if (tournament) c.tournament_size = *tournament;
    if (p_xover && p_mut) {
      c.p_crossover = *p_xover;
      c.p_mutation = *p_mut;
    } else if (p_xover) {
      c.p_crossover = *p_xover;
      c.p_mutation = 1.0 - *p_xover;
    } else if (p_mut) {
      c.p_mutation = *p_mut;
      c.p_crossover = 1.0 - *p_mut;
    }
    if (max_depth) c.max_depth = *max_depth;
    if (erc_lo) c.erc.lo = *erc_lo;
    if (erc_hi) c.erc.hi = *erc_hi;
    if (ms_fraction) c.ms_fraction = *ms_fraction;
    if (seed) c.seed = *seed;
    if (node_budget) c.node_budget = *node_budget;
  }
};

std::optional<std::size_t> parse_target_column(const std::string& text) {
  if (text.empty() || text == "last") return std::nullopt;
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("--target-col expects a column index or 'last', got '{}'", text));
  }
  return value;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  file << content;
  if (!file) throw std::runtime_error(fmt::format("failed writing '{}'", path));
}

// Turns a flat key=value file into "--key=value" arguments placed before the
// command line ones, so explicit flags take precedence.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key=value", path, line_no));
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    const auto key = strip(line.substr(0, eq));
    const auto value = strip(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", path, line_no));
    if (key == "config") throw ConfigError(fmt::format("{}:{}: config files cannot include others", path, line_no));
    out.push_back(fmt::format("--{}={}", key, value));
  }
  return out;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return args;
  // rest[0] is the subcommand name
  auto from_file = config_arguments(*path);
  std::vector<std::string> merged{rest.front()};
  merged.insert(merged.end(), from_file.begin(), from_file.end());
  merged.insert(merged.end(), rest.begin() + 1, rest.end());
  return merged;
}

struct DataFlags {
  std::string data;
  std::string test;
  std::string target_col = "last";
  std::size_t folds = 5;
  std::size_t fold = 0;

  void add_to(CLI::App& app, bool with_test) {
    app.add_option("--data", data, "CSV path or synthetic:<problem>[:n[:noise]]")->required();
    app.add_option("--target-col", target_col, "Target column (0-based index or 'last')");
    app.add_option("--folds", folds, "Folds used to carve a test partition when --test is absent");
    app.add_option("--fold", fold, "Fold held out as the test partition");
    if (with_test) app.add_option("--test", test, "Separate test CSV");
  }

  std::pair<Dataset, Dataset> load(std::uint64_t seed) const {
    const auto target = parse_target_column(target_col);
    auto all = load_dataset(data, target);
    if (!test.empty()) {
      auto held_out = load_dataset(test, target);
      if (held_out.num_features() != all.num_features()) {
        throw DataError(fmt::format("test data has {} features, training data has {}", held_out.num_features(),
                                    all.num_features()));
      }
      return {std::move(all), std::move(held_out)};
    }
    if (fold >= folds) throw ConfigError(fmt::format("--fold {} is out of range for {} folds", fold, folds));
    const auto assignment = kfold_split(all, folds, derive_seed(seed, {0xf01dULL}));
    const auto train_rows = assignment.train_rows(fold);
    const auto test_rows = assignment.test_rows(fold);
    auto train = all.subset(train_rows);
    auto held_out = all.subset(test_rows);
    train.name = held_out.name = all.name;
    return {std::move(train), std::move(held_out)};
  }
};

std::string shortest(double v) { return fmt::format("{}", v); }

int cmd_run(const std::string& engine_text, const EvolutionFlags& evo, const DataFlags& data_flags,
            const std::string& out_path, bool print_expr, std::ostream& out) {
  const auto kind = parse_engine(engine_text);
  auto config = EvolutionConfig::defaults(kind);
  evo.apply(config);
  config.validate();
  auto [train, test] = data_flags.load(config.seed);

  RunReport report;
  switch (kind) {
    case EngineKind::Gp: report = run_gp(config, train, test); break;
    case EngineKind::Gsgp: report = run_gsgp(config, train, test); break;
    case EngineKind::GsgpRed: report = run_gsgp_red(config, train, test); break;
  }
  write_file(out_path, to_json(report).dump(2) + "\n");

  out << fmt::format("engine      {}\n", report.engine);
  out << fmt::format("dataset     {} (train {}, test {}, features {})\n", report.dataset, report.n_train,
                     report.n_test, report.num_features);
  out << fmt::format("train RMSE  {}\n", shortest(report.final_train_rmse));
  out << fmt::format("test RMSE   {}\n", shortest(report.final_test_rmse));
  out << fmt::format("size        {}\n", report.best_size);
  if (report.term_count) out << fmt::format("terms       {}\n", *report.term_count);
  out << fmt::format("wall time   {:.3f} s\n", report.wall_time_seconds);
  if (print_expr) {
    if (report.best_infix) {
      out << "infix       " << *report.best_infix << '\n';
      out << "prefix      " << *report.best_prefix << '\n';
    } else {
      out << fmt::format("expression not printed: exact_size {} exceeds node budget {}\n", report.best_size,
                         config.node_budget);
    }
  }
  out << fmt::format("report      {}\n", out_path);
  return kExitOk;
}

struct BenchFlags {
  std::string suite;
  std::vector<std::string> data;
  std::optional<std::string> target_col;
  std::optional<std::size_t> folds, repeats, workers, pop, gens;
  std::optional<std::uint64_t> seed, node_budget;
  std::optional<double> alpha;
  std::string out = "bench-report.json";
};

int cmd_bench(const BenchFlags& f, std::ostream& out) {
  auto suite = load_suite_config(f.suite);
  if (!f.data.empty()) suite.datasets = f.data;
  if (f.target_col) suite.target_column = parse_target_column(*f.target_col);
  if (f.folds) suite.folds = *f.folds;
  if (f.repeats) suite.repeats = *f.repeats;
  if (f.workers) suite.workers = *f.workers;
  if (f.seed) suite.base_seed = *f.seed;
  if (f.alpha) suite.alpha = *f.alpha;
  for (auto* c : {&suite.gp, &suite.geometric}) {
    if (f.pop) c->pop_size = *f.pop;
    if (f.gens) c->generations = *f.gens;
    if (f.node_budget) c->node_budget = *f.node_budget;
  }
  suite.validate();
  const auto report = run_suite(suite);
  const auto tables = to_text_tables(report);
  write_file(f.out, to_json(report).dump(2) + "\n");
  auto text_path = f.out;
  if (text_path.size() > 5 && text_path.ends_with(".json")) text_path.resize(text_path.size() - 5);
  text_path += ".txt";
  write_file(text_path, tables);
  out << tables;
  std::size_t failed = 0;
  for (const auto& r : report.runs) failed += r.ok ? 0 : 1;
  out << fmt::format("\n{} runs, {} failed. Report {}, tables {}\n", report.runs.size(), failed, f.out, text_path);
  return report.dataset_failures.empty() ? kExitOk : kExitRunFailure;
}

int cmd_verify(const EvolutionFlags& evo, const DataFlags& data_flags, const std::string& out_path,
               std::ostream& out) {
  auto config = EvolutionConfig::defaults(EngineKind::GsgpRed);
  evo.apply(config);
  config.validate();
  auto [train, test] = data_flags.load(config.seed);
  const auto report = verify_equivalence(config.seed, config, train, test);
  if (!out_path.empty()) write_file(out_path, to_json(report).dump(2) + "\n");
  out << fmt::format("generations                 {}\n", report.generations);
  out << fmt::format("max trace deviation         {:.3g}\n", report.max_trace_deviation);
  out << fmt::format("max semantics deviation     {:.3g}\n", report.max_semantics_deviation);
  out << fmt::format("max recomputed deviation    {:.3g}\n", report.max_recomputed_deviation);
  out << fmt::format("gsgp size                   {}\n", report.gsgp_size);
  out << fmt::format("gsgp-red size               {} ({} terms)\n", report.red_size, report.red_terms);
  out << fmt::format("log10 size gap              {:.2f}\n", report.size_log10_gap);
  if (report.first_divergent_generation) {
    out << fmt::format("first divergent generation  {}\n", *report.first_divergent_generation);
  }
  out << (report.passed ? (report.warning ? "PASSED with warning\n" : "PASSED\n") : "FAILED\n");
  return report.passed ? kExitOk : kExitRunFailure;
}

int cmd_analyze_growth(const EvolutionFlags& evo, const DataFlags& data_flags, const std::string& out_path,
                       const std::string& csv_path, std::size_t r_samples, std::ostream& out) {
  auto config = EvolutionConfig::defaults(EngineKind::GsgpRed);
  evo.apply(config);
  config.validate();
  auto [train, test] = data_flags.load(config.seed);

  nlohmann::json generations = nlohmann::json::array();
  std::vector<double> gsgp_log10_median;
  const auto pointer = evolve_gsgp(config, train, test, [&](std::size_t, std::span<const PointerIndividual> pop) {
    std::vector<BigInt> sizes;
    sizes.reserve(pop.size());
    for (const auto& ind : pop) sizes.push_back(ind.exact_size());
    std::sort(sizes.begin(), sizes.end());
    gsgp_log10_median.push_back(log10_of(sizes[sizes.size() / 2]));
  });
  double e_p0 = 0.0;
  FrequencyHistogram final_histogram;
  const auto reduced = evolve_gsgp_red(config, train, test, [&](std::size_t g, std::span<const LinearIndividual> pop) {
    auto histogram = initial_tree_frequency(pop);
    double red_total = 0.0;
    for (const auto& ind : pop) red_total += static_cast<double>(red_node_count(ind));
    if (g == 0) {
      for (const auto& ind : pop) e_p0 += static_cast<double>(ind.terms.front().function->tree.node_count());
      e_p0 /= static_cast<double>(pop.size());
    }
    generations.push_back({{"generation", g},
                           {"initial_survivors", histogram.survivors},
                           {"mean_red_size", red_total / static_cast<double>(pop.size())},
                           {"log10_median_gsgp_size", gsgp_log10_median.at(g)}});
    final_histogram = std::move(histogram);
  });

  Rng rng(derive_seed(config.seed, {0x9e0ULL}));
  double e_r = 0.0;
  for (std::size_t i = 0; i < r_samples; ++i) {
    e_r += static_cast<double>(grow(config.max_depth, train.num_features(), config.erc, rng).node_count());
  }
  e_r /= static_cast<double>(std::max<std::size_t>(r_samples, 1));

  GrowthParams params{e_p0, e_r};
  params.g = config.generations;
  nlohmann::json result{{"schema_version", kReportSchemaVersion},
                        {"dataset", train.name},
                        {"config", to_json(config)},
                        {"measured_e_p0", e_p0},
                        {"measured_e_r", e_r},
                        {"log10_expected_size_gsm", log10_expected_size_gsm(params)},
                        {"log10_expected_size_gsx_e", log10_expected_size_gsx_e(params)},
                        {"log10_expected_size_gsx_m", log10_expected_size_gsx_m(params)},
                        {"generations", std::move(generations)},
                        {"final_histogram", to_json(final_histogram)},
                        {"stored_functions", reduced.stored_functions},
                        {"initial_functions", reduced.initial_functions},
                        {"best_gsgp_size", pointer.report.best_size},
                        {"best_red_size", reduced.report.best_size}};
  write_file(out_path, result.dump(2) + "\n");
  if (!csv_path.empty()) write_file(csv_path, to_csv(final_histogram));

  out << fmt::format("measured E[P0] {:.3f}, E[r] {:.3f}\n", e_p0, e_r);
  out << fmt::format("initial trees surviving after {} generations: {} of {}\n", config.generations,
                     final_histogram.survivors, config.pop_size);
  out << fmt::format("best size: gsgp {} nodes, gsgp-red {} nodes\n", pointer.report.best_size,
                     reduced.report.best_size);
  out << fmt::format("log10 expected size at g={}: gsm {:.2f}, gsx-e {:.2f}, gsx-m {:.2f}\n", config.generations,
                     log10_expected_size_gsm(params), log10_expected_size_gsx_e(params),
                     log10_expected_size_gsx_m(params));
  out << fmt::format("report {}\n", out_path);
  return kExitOk;
}

struct SizeFlags {
  std::string op;
  std::size_t g = 0;
  double ep0 = 0.0;
  double er = 0.0;
  unsigned a = kGsmExtraNodes;
  unsigned b = kGsxExtraNodes;
  unsigned c = 5;
  bool exact = false;
  bool log10 = false;
};

int cmd_expected_size(const SizeFlags& f, std::ostream& out) {
  if (f.op != "gsm" && f.op != "gsx-e" && f.op != "gsx-m") {
    throw ConfigError(fmt::format("unknown operator '{}' (expected gsm, gsx-e or gsx-m)", f.op));
  }
  GrowthParams p{f.ep0, f.er, f.a, f.b, f.c, f.g};
  try {
    p.validate();
    if (f.exact) {
      const auto v = f.op == "gsm" ? exact_expected_size_gsm(p)
                     : f.op == "gsx-e" ? exact_expected_size_gsx_e(p)
                                       : exact_expected_size_gsx_m(p);
      out << to_decimal(v) << '\n';
    } else if (f.log10) {
      const auto v = f.op == "gsm" ? log10_expected_size_gsm(p)
                     : f.op == "gsx-e" ? log10_expected_size_gsx_e(p)
                                       : log10_expected_size_gsx_m(p);
      out << shortest(v) << '\n';
    } else {
      const auto v = f.op == "gsm" ? expected_size_gsm(p)
                     : f.op == "gsx-e" ? expected_size_gsx_e(p)
                                       : expected_size_gsx_m(p);
      if (std::isinf(v)) {
        const auto l = f.op == "gsx-e" ? log10_expected_size_gsx_e(p) : log10_expected_size_gsx_m(p);
        const double exponent = std::floor(l);
        out << fmt::format("{}e+{}\n", shortest(std::pow(10.0, l - exponent)), exponent);
      } else {
        out << shortest(v) << '\n';
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbolic regression with GP, GSGP and GSGP-Red", "gsgpred"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  // --config is expanded before parsing; registered only for --help.
  std::string config_path;
  EvolutionFlags evo;
  DataFlags data_flags;
  std::string engine;
  std::string out_path;
  bool print_expr = false;
  auto* run = app.add_subcommand("run", "Run one engine on a dataset");
  run->add_option("--engine", engine, "gp, gsgp or gsgp-red")->required()->check(CLI::IsMember({"gp", "gsgp", "gsgp-red"}));
  data_flags.add_to(*run, true);
  evo.add_to(*run);
  run->add_option("--out", out_path, "Report path")->default_val("run-report.json");
  run->add_flag("--print-expr", print_expr, "Print the best expression");
  run->add_option("--config", config_path, "Flat key=value file; flags override it");

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Cross-validated comparison of engines");
  bench->add_option("suite", bench_flags.suite, "Suite config file")->required();
  bench->add_option("--data", bench_flags.data, "Datasets (replace the suite's list)")->multi_option_policy(
      CLI::MultiOptionPolicy::TakeAll);
  bench->add_option("--target-col", bench_flags.target_col, "Target column (0-based index or 'last')");
  bench->add_option("--folds", bench_flags.folds, "Folds");
  bench->add_option("--repeats", bench_flags.repeats, "Repeats per fold");
  bench->add_option("--workers", bench_flags.workers, "Concurrent runs");
  bench->add_option("--seed", bench_flags.seed, "Base seed");
  bench->add_option("--alpha", bench_flags.alpha, "Significance level");
  bench->add_option("--pop", bench_flags.pop, "Population size");
  bench->add_option("--gens", bench_flags.gens, "Generations");
  bench->add_option("--node-budget", bench_flags.node_budget, "Largest tree materialized");
  bench->add_option("--out", bench_flags.out, "JSON report path; tables go next to it as .txt");

  EvolutionFlags growth_evo;
  DataFlags growth_data;
  std::string growth_out = "growth-report.json";
  std::string growth_csv;
  std::size_t r_samples = 10000;
  auto* growth = app.add_subcommand("analyze-growth", "Size growth and initial-tree survival of a run");
  growth_data.add_to(*growth, true);
  growth_evo.add_to(*growth);
  growth->add_option("--out", growth_out, "JSON report path");
  growth->add_option("--csv", growth_csv, "Final initial-tree histogram as CSV");
  growth->add_option("--r-samples", r_samples, "Random trees sampled to measure E[r]");
  growth->add_option("--config", config_path, "Flat key=value file; flags override it");

  EvolutionFlags verify_evo;
  DataFlags verify_data;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify-equivalence", "Run GSGP and GSGP-Red with one seed and compare");
  verify_data.add_to(*verify, true);
  verify_evo.add_to(*verify);
  verify->add_option("--out", verify_out, "JSON report path");
  verify->add_option("--config", config_path, "Flat key=value file; flags override it");

  SizeFlags size_flags;
  auto* size = app.add_subcommand("expected-size", "Evaluate the expected-size formulas");
  size->add_option("operator", size_flags.op, "gsm, gsx-e or gsx-m")->required();
  size->add_option("--g", size_flags.g, "Generations");
  size->add_option("--ep0", size_flags.ep0, "Expected initial size")->required();
  size->add_option("--er", size_flags.er, "Expected random-tree size");
  size->add_option("--a", size_flags.a, "Extra nodes per mutation");
  size->add_option("--b", size_flags.b, "Extra nodes per Euclidean crossover");
  size->add_option("--c", size_flags.c, "Extra nodes per Manhattan crossover");
  size->add_flag("--exact", size_flags.exact, "Exact integer result");
  size->add_flag("--log10", size_flags.log10, "log10 of the result");

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (*run) return cmd_run(engine, evo, data_flags, out_path, print_expr, out);
    if (*bench) return cmd_bench(bench_flags, out);
    if (*growth) return cmd_analyze_growth(growth_evo, growth_data, growth_out, growth_csv, r_samples, out);
    if (*verify) return cmd_verify(verify_evo, verify_data, verify_out, out);
    if (*size) return cmd_expected_size(size_flags, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitConfigError;
  } catch (const DataError& e) {
    err << "dataset error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return kExitRunFailure;
  }
  return kExitRunFailure;
}

}  // namespace gsgp
