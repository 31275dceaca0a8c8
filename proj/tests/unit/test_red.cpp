#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "gsgp/data.hpp"
#include "gsgp/gsgp.hpp"
#include "gsgp/red.hpp"

using gsgp::Expr;

namespace {

Expr x(std::size_t i) { return Expr::variable(i); }
Expr c(double v) { return Expr::constant(v); }

gsgp::Dataset two_vars() { return gsgp::make_synthetic("poly", 16, 2); }

std::vector<double> coefficients(const gsgp::LinearIndividual& ind) {
  std::vector<double> out;
  for (const auto& t : ind.terms) out.push_back(t.coefficient);
  return out;
}

std::vector<std::string> keys(const gsgp::LinearIndividual& ind) {
  std::vector<std::string> out;
  for (const auto& t : ind.terms) out.push_back(t.key());
  return out;
}

}  // namespace

TEST_CASE("expansion and aggregation of a three-individual example") {
  const auto data = two_vars();
  gsgp::RedContext ctx(data);
  const auto f1 = Expr::aq(x(0), x(1));
  const auto f2 = Expr::add(x(1), c(0.4));
  const auto f3 = Expr::sub(x(0), c(0.6));
  const auto p1 = ctx.lift_initial(f1);
  const auto p2 = ctx.lift_initial(f2);
  const auto p3 = ctx.lift_initial(f3);

  const auto q1 = gsgp::aggregate(ctx.expand_gsx(p2, p3, 0.3));
  CHECK(coefficients(q1) == std::vector<double>{0.3, 0.7});
  CHECK(keys(q1) == std::vector<std::string>{gsgp::canonical_key(f2), gsgp::canonical_key(f3)});

  const auto q2 = gsgp::aggregate(ctx.expand_gsm(p1, 0.1, x(0), Expr::mul(c(2.0), x(1))));
  CHECK(coefficients(q2) == std::vector<double>{1.0, 0.1, -0.1});

  const auto expanded = ctx.expand_gsm(p3, 0.1, Expr::sub(x(0), c(0.6)), Expr::mul(x(0), x(1)));
  CHECK(expanded.term_count() == 3);
  const auto q3 = gsgp::aggregate(expanded);
  CHECK(coefficients(q3) == std::vector<double>{1.1, -0.1});
  CHECK(keys(q3) == std::vector<std::string>{gsgp::canonical_key(f3), "(* x0 x1)"});
  // the regenerated random tree resolves to the stored initial copy
  CHECK(q3.terms[0].function == p3.terms[0].function);
  CHECK(q3.terms[0].function->provenance == gsgp::Provenance::Initial);
}

TEST_CASE("aggregation drops exact zeros and keeps first positions") {
  const auto data = two_vars();
  gsgp::RedContext ctx(data);
  auto a = ctx.store().intern(x(0), gsgp::Provenance::Random);
  auto b = ctx.store().intern(x(1), gsgp::Provenance::Random);
  auto d = ctx.store().intern(c(3.0), gsgp::Provenance::Random);
  gsgp::LinearIndividual ind;
  ind.terms = {{b, 2.0}, {a, 0.5}, {b, -2.0}, {d, 1.0}, {a, 0.25}};
  const auto out = gsgp::aggregate(ind);
  CHECK(keys(out) == std::vector<std::string>{"x0", "0x1.8p+1"});
  CHECK(coefficients(out) == std::vector<double>{0.75, 1.0});
  const auto again = gsgp::aggregate(out);
  CHECK(keys(again) == keys(out));
  CHECK(coefficients(again) == coefficients(out));
  gsgp::LinearIndividual empty;
  empty.terms = {{a, 1.0}, {a, -1.0}};
  const auto none = gsgp::aggregate(empty);
  CHECK(none.term_count() == 0);
  CHECK(gsgp::red_node_count(none) == 1);
  CHECK(gsgp::to_expression(none).kind() == Expr::Kind::Constant);
}

TEST_CASE("function store interns by key and keeps the first provenance") {
  gsgp::FunctionStore store;
  const auto a = store.intern(Expr::add(x(0), c(0.5)), gsgp::Provenance::Initial);
  const auto b = store.intern(Expr::add(x(0), c(0.5)), gsgp::Provenance::Random);
  const auto r = store.intern(x(3), gsgp::Provenance::Random);
  const auto i2 = store.intern(x(4), gsgp::Provenance::Initial);
  CHECK(a == b);
  CHECK(b->provenance == gsgp::Provenance::Initial);
  CHECK(a->initial_index == 0);
  CHECK_FALSE(r->initial_index.has_value());
  CHECK(i2->initial_index == 1);
  CHECK(store.size() == 3);
  CHECK(store.initial_count() == 2);
}

TEST_CASE("flattened size and expression") {
  const auto data = two_vars();
  gsgp::RedContext ctx(data);
  const auto p = ctx.lift_initial(Expr::mul(x(0), x(1)));
  CHECK(gsgp::red_node_count(p) == 5);
  const auto child = gsgp::aggregate(ctx.expand_gsm(p, 0.2, x(0), Expr::add(x(1), c(1.0))));
  // (3 + 2) + (1 + 2) + (3 + 2) + 2 joins
  CHECK(gsgp::red_node_count(child) == 15);
  const auto e = gsgp::to_expression(child);
  CHECK(e.node_count() == 15);
  const auto direct = gsgp::semantics(e, data.features);
  const auto dot = gsgp::red_semantics(child, data.features);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(direct[i] == doctest::Approx(dot[i]).epsilon(1e-12));
    CHECK(child.train[i] == doctest::Approx(dot[i]).epsilon(1e-12));
    const double expected = data.features(i, 0) * data.features(i, 1) +
                            0.2 * (data.features(i, 0) - (data.features(i, 1) + 1.0));
    CHECK(dot[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  const auto table = gsgp::term_table_json(child);
  CHECK(table.size() == 3);
  CHECK(table[1]["coefficient"] == 0.2);
}

TEST_CASE("same seed: GSGP-Red reproduces the GSGP run") {
  const auto data = gsgp::make_synthetic("mul-add", 40, 6, 0.05);
  auto cfg = gsgp::EvolutionConfig::defaults(gsgp::EngineKind::GsgpRed);
  cfg.pop_size = 30;
  cfg.generations = 20;
  cfg.seed = 17;
  const auto pointer = gsgp::evolve_gsgp(cfg, data, data);
  const auto reduced = gsgp::evolve_gsgp_red(cfg, data, data);
  REQUIRE(pointer.report.trace.size() == reduced.report.trace.size());
  for (std::size_t g = 0; g < pointer.report.trace.size(); ++g) {
    CHECK(pointer.report.trace[g].best_train_rmse == reduced.report.trace[g].best_train_rmse);
  }
  CHECK(pointer.best == reduced.best);
  CHECK(reduced.report.term_count == reduced.population[reduced.best].term_count());
  CHECK(reduced.report.best_size == std::to_string(gsgp::red_node_count(reduced.population[reduced.best])));
  CHECK(reduced.initial_functions <= cfg.pop_size);
  CHECK(reduced.stored_functions >= reduced.initial_functions);
}

TEST_CASE("terms stay unique after every generation") {
  const auto data = gsgp::make_synthetic("ratio", 30, 2);
  auto cfg = gsgp::EvolutionConfig::defaults(gsgp::EngineKind::GsgpRed);
  cfg.pop_size = 20;
  cfg.generations = 10;
  std::size_t checked = 0;
  gsgp::evolve_gsgp_red(cfg, data, data, [&](std::size_t, std::span<const gsgp::LinearIndividual> pop) {
    for (const auto& ind : pop) {
      std::set<std::string> seen;
      for (const auto& t : ind.terms) {
        CHECK(seen.insert(t.key()).second);
        CHECK(t.coefficient != 0.0);
      }
      ++checked;
    }
  });
  CHECK(checked == 20 * 11);
}

TEST_CASE("crossover-built individuals are smaller than their pointer twins") {
  const auto data = two_vars();
  gsgp::RedContext red(data);
  const gsgp::PointerContext ptr(data, data);
  gsgp::Rng rng(8);
  std::vector<gsgp::LinearIndividual> lin;
  std::vector<gsgp::PointerIndividual> pts;
  for (int i = 0; i < 4; ++i) {
    const auto t = gsgp::grow(4, 2, {-1, 1}, rng);
    lin.push_back(red.lift_initial(t));
    pts.push_back(ptr.initial(t));
  }
  for (int step = 0; step < 60; ++step) {
    const auto a = rng.index(lin.size());
    const auto b = rng.index(lin.size());
    const double k = rng.uniform01();
    lin.push_back(gsgp::aggregate(red.expand_gsx(lin[a], lin[b], k)));
    pts.push_back(ptr.gsx_e(pts[a], pts[b], k));
  }
  // For crossover offspring, gap = pointer size - flat size satisfies
  // gap(child) >= gap(a) + gap(b) + 4 with gap(initial) = -2, so gap >= 0.
  for (std::size_t i = 4; i < lin.size(); ++i) CHECK(gsgp::BigInt(gsgp::red_node_count(lin[i])) <= pts[i].exact_size());
}
