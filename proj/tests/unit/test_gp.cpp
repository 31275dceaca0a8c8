#include "doctest.h"

#include <cmath>
#include <vector>

#include "gsgp/data.hpp"
#include "gsgp/gp.hpp"
#include "gsgp/selection.hpp"

using gsgp::Expr;

namespace {

Expr x(std::size_t i) { return Expr::variable(i); }
Expr c(double v) { return Expr::constant(v); }

bool is_subtree_of(const Expr& needle, const Expr& hay) {
  for (std::uint64_t i = 0; i < hay.node_count(); ++i) {
    if (gsgp::structurally_equal(gsgp::node_at(hay, i), needle)) return true;
  }
  return false;
}

// Preorder index of the replaced node: walk down the rebuilt path, where each
// rebuilt ancestor keeps one child identical (same node) to the original.
std::uint64_t mutation_site(const Expr& before, const Expr& after) {
  std::uint64_t index = 0;
  Expr a = before, b = after;
  while (true) {
    if (a.is_terminal() || b.is_terminal() || a.symbol() != b.symbol()) return index;
    const bool left_same = a.left().id() == b.left().id();
    const bool right_same = a.right().id() == b.right().id();
    if (left_same == right_same) return index;
    if (right_same) {
      index += 1;
      a = a.left();
      b = b.left();
    } else {
      index += 1 + a.left().node_count();
      a = a.right();
      b = b.right();
    }
  }
}

gsgp::EvolutionConfig small_config(std::uint64_t seed) {
  auto cfg = gsgp::EvolutionConfig::defaults(gsgp::EngineKind::Gp);
  cfg.pop_size = 50;
  cfg.generations = 30;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("tournament selection frequencies follow the with-replacement law") {
  // rank r (1 = best) wins when it is drawn and nothing better is:
  // ((10 - r + 1)^7 - (10 - r)^7) / 10^7
  std::vector<double> fitness{5, 2, 9, 1, 7, 3, 10, 4, 8, 6};
  gsgp::Rng rng(21);
  const int trials = 100000;
  std::vector<int> by_rank(11, 0);
  for (int t = 0; t < trials; ++t) {
    const auto i = gsgp::tournament_select(fitness, 7, rng);
    ++by_rank[static_cast<int>(fitness[i])];
  }
  double chi2 = 0.0;
  int dof = 0;
  double previous = 1e9;
  for (int r = 1; r <= 10; ++r) {
    const double p = (std::pow(11.0 - r, 7) - std::pow(10.0 - r, 7)) / 1e7;
    const double expected = p * trials;
    if (expected >= 5.0) {
      chi2 += (by_rank[r] - expected) * (by_rank[r] - expected) / expected;
      ++dof;
    }
    CHECK(by_rank[r] <= previous);
    previous = by_rank[r];
  }
  CHECK(dof >= 5);
  CHECK(chi2 < 27.88);  // 0.999 quantile at 9 degrees of freedom bounds every dof <= 9
}

TEST_CASE("tournament of one is uniform") {
  std::vector<double> fitness{1, 2, 3, 4, 5};
  gsgp::Rng rng(22);
  std::vector<int> counts(5, 0);
  for (int t = 0; t < 50000; ++t) ++counts[gsgp::tournament_select(fitness, 1, rng)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  CHECK(chi2 < 18.47);
}

TEST_CASE("tournament ties go to the earliest draw") {
  std::vector<double> fitness(8, 1.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    gsgp::Rng rng(seed);
    gsgp::Rng replay(seed);
    const auto first = replay.index(fitness.size());
    CHECK(gsgp::tournament_select(fitness, 4, rng) == first);
  }
}

TEST_CASE("worst fitness never wins against a finite one") {
  std::vector<double> fitness{gsgp::kWorstFitness, 3.0};
  gsgp::Rng rng(5);
  // the infinite individual wins only when both draws pick it: p = 1/4
  int worst_wins = 0;
  const int trials = 40000;
  for (int t = 0; t < trials; ++t) worst_wins += gsgp::tournament_select(fitness, 2, rng) == 0 ? 1 : 0;
  CHECK(std::abs(worst_wins / double(trials) - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / trials));
  const std::vector<double> target{1.0, 2.0};
  CHECK(gsgp::fitness_from_semantics(std::vector<double>{INFINITY, 2.0}, target) == gsgp::kWorstFitness);
  CHECK(gsgp::fitness_from_semantics(std::vector<double>{NAN, 2.0}, target) == gsgp::kWorstFitness);
  CHECK(gsgp::fitness_from_semantics(std::vector<double>{1.0, 2.0}, target) == 0.0);
  CHECK(gsgp::best_index(std::vector<double>{3, 1, 1, 2}) == 1);
}

TEST_CASE("crossover with terminal parents") {
  gsgp::Rng rng(31);
  const auto p2 = Expr::add(Expr::mul(x(0), x(1)), Expr::sub(x(2), c(0.5)));
  for (int t = 0; t < 200; ++t) {
    const auto child = gsgp::subtree_crossover(x(3), p2, rng);
    CHECK(is_subtree_of(child, p2));
  }
  const auto p1 = Expr::add(Expr::mul(x(0), x(1)), Expr::sub(x(2), c(0.5)));
  for (int t = 0; t < 200; ++t) {
    const auto child = gsgp::subtree_crossover(p1, c(9.0), rng);
    // p1 with exactly one subtree replaced by the constant 9
    bool found = false;
    for (std::uint64_t i = 0; i < p1.node_count(); ++i) {
      if (gsgp::structurally_equal(gsgp::replace_at(p1, i, c(9.0)), child)) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("crossover size bound") {
  gsgp::Rng rng(32);
  for (int t = 0; t < 500; ++t) {
    const auto a = gsgp::grow(5, 3, {-1, 1}, rng);
    const auto b = gsgp::grow(5, 3, {-1, 1}, rng);
    const auto child = gsgp::subtree_crossover(a, b, rng);
    CHECK(child.node_count() <= a.node_count() + b.node_count() - 1);
  }
}

TEST_CASE("mutation of a terminal is a fresh tree and depth is bounded") {
  gsgp::Rng rng(33);
  for (int t = 0; t < 100; ++t) {
    const auto child = gsgp::subtree_mutation(x(0), 4, 2, {-1, 1}, rng);
    CHECK(child.depth() <= 4);
  }
  const auto p = gsgp::full(3, 3, {-1, 1}, rng);
  for (int t = 0; t < 1000; ++t) CHECK(gsgp::subtree_mutation(p, 6, 3, {-1, 1}, rng).depth() <= 3 - 1 + 6);
}

TEST_CASE("mutation sites are uniform over nodes") {
  gsgp::Rng rng(34);
  const auto p = Expr::add(Expr::mul(x(0), x(1)), Expr::sub(x(2), c(0.5)));
  REQUIRE(p.node_count() == 7);
  std::vector<int> counts(7, 0);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) ++counts[mutation_site(p, gsgp::subtree_mutation(p, 6, 3, {-1, 1}, rng))];
  double chi2 = 0.0;
  const double expected = draws / 7.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 22.46);  // 0.999 quantile, 6 degrees of freedom
}

TEST_CASE("GP run keeps the best training error non-increasing") {
  const auto data = gsgp::make_synthetic("mul-add", 60, 4, 0.05);
  const auto train = data.subset(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17,
                                                          18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32,
                                                          33, 34, 35, 36, 37, 38, 39});
  const auto test = data.subset(std::vector<std::size_t>{40, 41, 42, 43, 44, 45, 46, 47, 48, 49});
  const auto result = gsgp::evolve_gp(small_config(3), train, test);
  const auto& trace = result.report.trace;
  REQUIRE(trace.size() == 31);
  for (std::size_t g = 1; g < trace.size(); ++g) CHECK(trace[g].best_train_rmse <= trace[g - 1].best_train_rmse);
  CHECK(result.population.size() == 50);
  CHECK(result.report.final_train_rmse == trace.back().best_train_rmse);
  CHECK(result.report.best_prefix.has_value());
  CHECK(result.report.best_infix.has_value());
}

TEST_CASE("GP run is deterministic under a seed") {
  const auto data = gsgp::make_synthetic("poly", 40, 5);
  const auto a = gsgp::run_gp(small_config(9), data, data);
  const auto b = gsgp::run_gp(small_config(9), data, data);
  CHECK(gsgp::to_json_without_times(a) == gsgp::to_json_without_times(b));
  const auto other = gsgp::run_gp(small_config(10), data, data);
  CHECK(gsgp::to_json_without_times(a) != gsgp::to_json_without_times(other));
}

TEST_CASE("zero generations report the initial best") {
  const auto data = gsgp::make_synthetic("poly", 30, 5);
  auto cfg = small_config(1);
  cfg.generations = 0;
  const auto result = gsgp::evolve_gp(cfg, data, data);
  CHECK(result.report.trace.size() == 1);
  double best = gsgp::kWorstFitness;
  for (const auto& ind : result.population) best = std::min(best, ind.fitness);
  CHECK(result.report.final_train_rmse == best);
}
