#include "doctest.h"

#include <cmath>
#include <vector>

#include "gsgp/data.hpp"
#include "gsgp/growth.hpp"

using gsgp::BigInt;
using gsgp::Expr;
using gsgp::GrowthParams;

namespace {

GrowthParams params(double e_p0, double e_r, std::size_t g) {
  GrowthParams p;
  p.e_p0 = e_p0;
  p.e_r = e_r;
  p.g = g;
  return p;
}

// Size recurrences applied generation by generation.
BigInt chain_gsm(BigInt s, BigInt e_r, unsigned a, std::size_t g) {
  for (std::size_t i = 0; i < g; ++i) s = s + 2 * e_r + a;
  return s;
}
BigInt chain_gsx(BigInt s, BigInt extra, std::size_t g) {
  for (std::size_t i = 0; i < g; ++i) s = s + s + extra;
  return s;
}

}  // namespace

TEST_CASE("mutation growth is linear") {
  CHECK(gsgp::expected_size_gsm(params(10, 7, 0)) == 10.0);
  CHECK(gsgp::expected_size_gsm(params(10, 7, 3)) == 64.0);
  CHECK(gsgp::expected_size_gsm(params(10, 7, 4)) - gsgp::expected_size_gsm(params(10, 7, 3)) == 18.0);
  CHECK(gsgp::exact_expected_size_gsm(params(10, 7, 3)) == chain_gsm(10, 7, 4, 3));
}

TEST_CASE("Euclidean crossover growth doubles") {
  CHECK(gsgp::expected_size_gsx_e(params(10, 0, 0)) == 10.0);
  CHECK(gsgp::expected_size_gsx_e(params(10, 0, 1)) == 25.0);
  CHECK(gsgp::expected_size_gsx_e(params(10, 0, 5)) == 32 * 10 + 31 * 5);
}

TEST_CASE("Manhattan crossover growth") {
  auto p = params(10, 7, 2);
  p.c = 4;
  CHECK(gsgp::expected_size_gsx_m(p) == 73.0);
  CHECK(gsgp::expected_size_gsx_m(params(10, 7, 0)) == 10.0);
  for (std::size_t g : {0u, 1u, 7u, 30u}) {
    auto m = params(12, 0, g);
    m.c = m.b;
    CHECK(gsgp::expected_size_gsx_m(m) == gsgp::expected_size_gsx_e(m));
  }
}

TEST_CASE("exact big-integer evaluation matches the recurrences") {
  CHECK(gsgp::exact_expected_size_gsx_e(params(30, 0, 250)) == chain_gsx(30, 5, 250));
  CHECK(gsgp::exact_expected_size_gsx_e(params(30, 0, 250)) == BigInt(30) * (BigInt(1) << 250) + ((BigInt(1) << 250) - 1) * 5);
  CHECK(gsgp::exact_expected_size_gsx_m(params(30, 9, 100)) == chain_gsx(30, 9 + 5, 100));
  CHECK(gsgp::exact_expected_size_gsm(params(30, 9, 1000)) == chain_gsm(30, 9, 4, 1000));
  CHECK_THROWS(gsgp::exact_expected_size_gsx_e(params(30.5, 0, 3)));
}

TEST_CASE("log-space evaluation agrees and survives overflow") {
  const auto p = params(30, 9, 250);
  CHECK(gsgp::log10_expected_size_gsx_e(p) == doctest::Approx(std::log10(gsgp::expected_size_gsx_e(p))));
  CHECK(30.0 * std::ldexp(1.0, 250) == doctest::Approx(5.4e76).epsilon(0.01));
  CHECK(gsgp::expected_size_gsx_e(p) == doctest::Approx(35.0 * std::ldexp(1.0, 250) - 5.0));
  CHECK(gsgp::log10_expected_size_gsm(p) == doctest::Approx(std::log10(gsgp::expected_size_gsm(p))));
  CHECK(gsgp::log10_expected_size_gsx_m(p) == doctest::Approx(std::log10(gsgp::expected_size_gsx_m(p))));
  const auto huge = params(30, 9, 5000);
  CHECK(std::isinf(gsgp::expected_size_gsx_e(huge)));
  CHECK(gsgp::log10_expected_size_gsx_e(huge) ==
        doctest::Approx(gsgp::log10_of(gsgp::exact_expected_size_gsx_e(huge))).epsilon(1e-12));
}

TEST_CASE("parameters are validated") {
  CHECK_THROWS(params(0, 1, 1).validate());
  CHECK_THROWS(params(1, -1, 1).validate());
  CHECK_NOTHROW(params(1, 0, 1).validate());
}

TEST_CASE("full crossover lineages over equal-size roots hit the formula exactly") {
  const auto data = gsgp::make_synthetic("poly", 10, 1);
  const gsgp::PointerContext ctx(data, data);
  std::vector<gsgp::PointerIndividual> roots;
  gsgp::Rng rng(2);
  for (int i = 0; i < 20; ++i) roots.push_back(ctx.initial(gsgp::full(3, 2, {-1, 1}, rng)));
  for (std::size_t g : {0u, 1u, 4u, 8u}) {
    const double mean = gsgp::simulate_gsx_lineages(ctx, roots, g, 5, rng);
    CHECK(mean == gsgp::expected_size_gsx_e(params(7, 0, g)));
  }
}

TEST_CASE("mean node count") {
  const std::vector<Expr> trees{Expr::variable(0), Expr::add(Expr::variable(0), Expr::variable(1))};
  CHECK(gsgp::mean_node_count(trees) == 2.0);
}

TEST_CASE("initial tree frequency") {
  const auto data = gsgp::make_synthetic("poly", 10, 1);
  gsgp::RedContext ctx(data);
  const auto f0 = Expr::sub(Expr::variable(0), Expr::constant(0.6));
  const auto f1 = Expr::add(Expr::variable(1), Expr::constant(0.4));
  const auto f2 = Expr::aq(Expr::variable(0), Expr::variable(1));
  std::vector<gsgp::LinearIndividual> pop{ctx.lift_initial(f0), ctx.lift_initial(f1), ctx.lift_initial(f2)};

  auto h = gsgp::initial_tree_frequency(pop);
  CHECK(h.survivors == 3);
  CHECK(h.total() == 3);
  for (const auto& e : h.entries) CHECK(e.count == 1);

  // the regenerated random copy of f0 merges into the initial term
  const auto merged = gsgp::aggregate(ctx.expand_gsm(pop[0], 0.1, f0, Expr::mul(Expr::variable(0), Expr::variable(1))));
  const auto mixed = gsgp::aggregate(ctx.expand_gsx(pop[0], pop[1], 0.5));
  std::vector<gsgp::LinearIndividual> next{merged, mixed, mixed};
  h = gsgp::initial_tree_frequency(next);
  CHECK(h.survivors == 2);
  REQUIRE(h.entries.size() == 2);
  CHECK(h.entries[0].initial_index == 0);
  CHECK(h.entries[0].count == 3);
  CHECK(h.entries[1].initial_index == 1);
  CHECK(h.entries[1].count == 2);
  CHECK(h.total() == 5);

  const auto csv = gsgp::to_csv(h);
  CHECK(csv.rfind("initial_index,key,count\n", 0) == 0);
  CHECK(csv.find("0,\"(- x0 0x1.3333333333333p-1)\",3") != std::string::npos);
  const auto j = gsgp::to_json(h);
  CHECK(j["survivors"] == 2);
  CHECK(j["entries"][1]["count"] == 2);
}

TEST_CASE("crossover-only runs lose initial trees") {
  const auto data = gsgp::make_synthetic("mul-add", 30, 3);
  auto cfg = gsgp::EvolutionConfig::defaults(gsgp::EngineKind::GsgpRed);
  cfg.pop_size = 20;
  cfg.generations = 15;
  cfg.p_crossover = 1.0;
  cfg.p_mutation = 0.0;
  const auto result = gsgp::evolve_gsgp_red(cfg, data, data);
  const auto h = gsgp::initial_tree_frequency(result.population);
  std::size_t max_terms = 0;
  for (const auto& ind : result.population) max_terms = std::max(max_terms, ind.term_count());
  CHECK(h.survivors <= result.initial_functions);
  CHECK(h.survivors < cfg.pop_size);
  CHECK(h.total() <= cfg.pop_size * max_terms);
}
