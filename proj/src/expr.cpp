#include "gsgp/expr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "gsgp/errors.hpp"

namespace gsgp {

struct Expr::Node {
  Kind kind = Kind::Constant;
  Symbol symbol = Symbol::Add;
  std::size_t index = 0;
  double value = 0.0;
  Expr left_expr{nullptr};
  Expr right_expr{nullptr};
  std::uint64_t count = 1;
  int depth = 1;
  std::size_t arity = 0;
};

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t sum = a + b;
  return sum < a ? std::numeric_limits<std::uint64_t>::max() : sum;
}

}  // namespace

Expr Expr::variable(std::size_t index) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Variable;
  node->index = index;
  node->arity = index + 1;
  return Expr(std::move(node));
}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("expression constants must be finite");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Constant;
  node->value = value;
  return Expr(std::move(node));
}

Expr Expr::function(Symbol symbol, Expr left, Expr right) {
  if (!left.node_ || !right.node_) throw std::invalid_argument("function node needs two children");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Function;
  node->symbol = symbol;
  node->count = saturating_add(saturating_add(left.node_count(), right.node_count()), 1);
  node->depth = 1 + std::max(left.depth(), right.depth());
  node->arity = std::max(left.arity_hint(), right.arity_hint());
  node->left_expr = std::move(left);
  node->right_expr = std::move(right);
  return Expr(std::move(node));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

Symbol Expr::symbol() const {
  if (node_->kind != Kind::Function) throw std::logic_error("terminal has no symbol");
  return node_->symbol;
}

std::size_t Expr::variable_index() const {
  if (node_->kind != Kind::Variable) throw std::logic_error("not a variable");
  return node_->index;
}

double Expr::constant_value() const {
  if (node_->kind != Kind::Constant) throw std::logic_error("not a constant");
  return node_->value;
}

const Expr& Expr::left() const {
  if (node_->kind != Kind::Function) throw std::logic_error("terminal has no children");
  return node_->left_expr;
}

const Expr& Expr::right() const {
  if (node_->kind != Kind::Function) throw std::logic_error("terminal has no children");
  return node_->right_expr;
}

std::uint64_t Expr::node_count() const noexcept { return node_->count; }
int Expr::depth() const noexcept { return node_->depth; }
std::size_t Expr::arity_hint() const noexcept { return node_->arity; }

const char* symbol_name(Symbol symbol) noexcept {
  switch (symbol) {
    case Symbol::Add: return "+";
    case Symbol::Sub: return "-";
    case Symbol::Mul: return "*";
    case Symbol::AQ: return "aq";
  }
  return "?";
}

double analytic_quotient(double a, double b) { return a / std::sqrt(1.0 + b * b); }

namespace {

double apply(Symbol symbol, double a, double b) {
  switch (symbol) {
    case Symbol::Add: return a + b;
    case Symbol::Sub: return a - b;
    case Symbol::Mul: return a * b;
    case Symbol::AQ: return analytic_quotient(a, b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void check_shape(const Expr& expr, std::size_t width) {
  if (expr.arity_hint() > width) {
    throw ShapeError(fmt::format("expression references x{} but inputs have {} column(s)",
                                 expr.arity_hint() - 1, width));
  }
}

double evaluate_at(const Expr& e, std::span<const double> row, std::string& path, std::size_t row_index) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e.constant_value();
    case Expr::Kind::Variable: return row[e.variable_index()];
    case Expr::Kind::Function: break;
  }
  const auto mark = path.size();
  path += ".left";
  const double a = evaluate_at(e.left(), row, path, row_index);
  path.resize(mark);
  path += ".right";
  const double b = evaluate_at(e.right(), row, path, row_index);
  path.resize(mark);
  const double v = apply(e.symbol(), a, b);
  if (!std::isfinite(v)) {
    throw EvalError(path, row_index,
                    fmt::format("non-finite value at {} (row {}): {}({}, {})", path, row_index,
                                symbol_name(e.symbol()), a, b));
  }
  return v;
}

using Memo = std::unordered_map<const void*, std::vector<double>>;

std::vector<double> eval_column(const Expr& e, const Matrix& x, Memo* memo) {
  const auto n = x.rows();
  switch (e.kind()) {
    case Expr::Kind::Constant: return std::vector<double>(n, e.constant_value());
    case Expr::Kind::Variable: {
      std::vector<double> out(n);
      const auto j = e.variable_index();
      for (std::size_t i = 0; i < n; ++i) out[i] = x(i, j);
      return out;
    }
    case Expr::Kind::Function: break;
  }
  if (memo) {
    if (auto it = memo->find(e.id()); it != memo->end()) return it->second;
  }
  auto a = eval_column(e.left(), x, memo);
  const auto b = eval_column(e.right(), x, memo);
  const auto symbol = e.symbol();
  for (std::size_t i = 0; i < n; ++i) a[i] = apply(symbol, a[i], b[i]);
  if (memo) memo->emplace(e.id(), a);
  return a;
}

// Above this size an expression is likely a shared DAG (reconstructed GSGP
// individual); evaluation then memoizes by node identity.
constexpr std::uint64_t kMemoThreshold = 4096;

}  // namespace

double evaluate(const Expr& expr, std::span<const double> row) {
  check_shape(expr, row.size());
  std::string path = "root";
  const double v = evaluate_at(expr, row, path, 0);
  if (!std::isfinite(v)) throw EvalError(path, 0, "non-finite value at root");
  return v;
}

Semantics raw_semantics(const Expr& expr, const Matrix& inputs) {
  check_shape(expr, inputs.cols());
  if (expr.node_count() > kMemoThreshold) {
    Memo memo;
    return eval_column(expr, inputs, &memo);
  }
  return eval_column(expr, inputs, nullptr);
}

Semantics semantics(const Expr& expr, const Matrix& inputs) {
  auto values = raw_semantics(expr, inputs);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i])) continue;
    std::string path = "root";
    try {
      evaluate_at(expr, inputs.row(i), path, i);
    } catch (const EvalError& e) {
      throw EvalError(e.path(), i, e.what());
    }
    throw EvalError(path, i, fmt::format("non-finite value at row {}", i));
  }
  return values;
}

namespace {

void append_key(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant: fmt::format_to(std::back_inserter(out), "{:a}", e.constant_value()); return;
    case Expr::Kind::Variable: fmt::format_to(std::back_inserter(out), "x{}", e.variable_index()); return;
    case Expr::Kind::Function: break;
  }
  out += '(';
  out += symbol_name(e.symbol());
  out += ' ';
  append_key(e.left(), out);
  out += ' ';
  append_key(e.right(), out);
  out += ')';
}

void append_infix(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant: fmt::format_to(std::back_inserter(out), "{}", e.constant_value()); return;
    case Expr::Kind::Variable: fmt::format_to(std::back_inserter(out), "x{}", e.variable_index()); return;
    case Expr::Kind::Function: break;
  }
  if (e.symbol() == Symbol::AQ) {
    out += "aq(";
    append_infix(e.left(), out);
    out += ", ";
    append_infix(e.right(), out);
    out += ')';
    return;
  }
  out += '(';
  append_infix(e.left(), out);
  out += ' ';
  out += symbol_name(e.symbol());
  out += ' ';
  append_infix(e.right(), out);
  out += ')';
}

}  // namespace

std::string canonical_key(const Expr& expr) {
  std::string out;
  append_key(expr, out);
  return out;
}

std::string to_infix(const Expr& expr) {
  std::string out;
  append_infix(expr, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant:
      return std::bit_cast<std::uint64_t>(a.constant_value()) == std::bit_cast<std::uint64_t>(b.constant_value());
    case Expr::Kind::Variable: return a.variable_index() == b.variable_index();
    case Expr::Kind::Function:
      return a.symbol() == b.symbol() && structurally_equal(a.left(), b.left()) &&
             structurally_equal(a.right(), b.right());
  }
  return false;
}

Expr node_at(const Expr& expr, std::uint64_t index) {
  if (index >= expr.node_count()) throw std::out_of_range("node index out of range");
  const Expr* e = &expr;
  while (index > 0) {
    const auto left_count = e->left().node_count();
    if (index <= left_count) {
      index -= 1;
      e = &e->left();
    } else {
      index -= 1 + left_count;
      e = &e->right();
    }
  }
  return *e;
}

Expr replace_at(const Expr& expr, std::uint64_t index, Expr replacement) {
  if (index >= expr.node_count()) throw std::out_of_range("node index out of range");
  if (index == 0) return replacement;
  const auto left_count = expr.left().node_count();
  if (index <= left_count) {
    return Expr::function(expr.symbol(), replace_at(expr.left(), index - 1, std::move(replacement)),
                          expr.right());
  }
  return Expr::function(expr.symbol(), expr.left(),
                        replace_at(expr.right(), index - 1 - left_count, std::move(replacement)));
}

namespace {

constexpr std::size_t kFunctionCount = 4;

Expr make_terminal(std::size_t pick, std::size_t num_vars, Interval erc, Rng& rng) {
  if (pick < num_vars) return Expr::variable(pick);
  return Expr::constant(rng.uniform(erc.lo, erc.hi));
}

}  // namespace

Expr grow(int max_depth, std::size_t num_vars, Interval erc, Rng& rng) {
  if (max_depth < 1) throw std::invalid_argument("grow: max_depth must be at least 1");
  if (max_depth == 1) return make_terminal(rng.index(num_vars + 1), num_vars, erc, rng);
  const auto pick = rng.index(kFunctionCount + num_vars + 1);
  if (pick >= kFunctionCount) return make_terminal(pick - kFunctionCount, num_vars, erc, rng);
  auto left = grow(max_depth - 1, num_vars, erc, rng);
  auto right = grow(max_depth - 1, num_vars, erc, rng);
  return Expr::function(static_cast<Symbol>(pick), std::move(left), std::move(right));
}

Expr full(int depth, std::size_t num_vars, Interval erc, Rng& rng) {
  if (depth < 1) throw std::invalid_argument("full: depth must be at least 1");
  if (depth == 1) return make_terminal(rng.index(num_vars + 1), num_vars, erc, rng);
  const auto symbol = static_cast<Symbol>(rng.index(kFunctionCount));
  auto left = full(depth - 1, num_vars, erc, rng);
  auto right = full(depth - 1, num_vars, erc, rng);
  return Expr::function(symbol, std::move(left), std::move(right));
}

std::vector<Expr> ramped_half_and_half(std::size_t pop_size, int max_depth, std::size_t num_vars,
                                       Interval erc, Rng& rng) {
  if (pop_size < 2) throw std::invalid_argument("ramped half-and-half needs at least 2 individuals");
  if (max_depth < 2) throw std::invalid_argument("ramped half-and-half needs max_depth >= 2");
  const auto ramps = static_cast<std::size_t>(max_depth - 1);
  std::vector<Expr> population;
  population.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    const int depth = 2 + static_cast<int>((i / 2) % ramps);
    population.push_back(i % 2 == 0 ? grow(depth, num_vars, erc, rng) : full(depth, num_vars, erc, rng));
  }
  return population;
}

}  // namespace gsgp
