#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gsgp/matrix.hpp"
#include "gsgp/rng.hpp"

namespace gsgp {

/// Function symbols. All four are binary.
enum class Symbol : std::uint8_t { Add, Sub, Mul, AQ };

/// Closed interval used for ephemeral random constants.
struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

/// Output vector of an expression over the rows of a dataset.
using Semantics = std::vector<double>;

/// Immutable expression tree. Copies share structure; a node may be reachable
/// through several parents (reconstructed GSGP individuals are DAGs).
class Expr {
 public:
  enum class Kind : std::uint8_t { Function, Variable, Constant };

  static Expr variable(std::size_t index);
  /// Throws std::invalid_argument for NaN or infinite values.
  static Expr constant(double value);
  static Expr function(Symbol symbol, Expr left, Expr right);

  static Expr add(Expr l, Expr r) { return function(Symbol::Add, std::move(l), std::move(r)); }
  static Expr sub(Expr l, Expr r) { return function(Symbol::Sub, std::move(l), std::move(r)); }
  static Expr mul(Expr l, Expr r) { return function(Symbol::Mul, std::move(l), std::move(r)); }
  static Expr aq(Expr l, Expr r) { return function(Symbol::AQ, std::move(l), std::move(r)); }

  Kind kind() const noexcept;
  bool is_terminal() const noexcept { return kind() != Kind::Function; }
  Symbol symbol() const;
  std::size_t variable_index() const;
  double constant_value() const;
  const Expr& left() const;
  const Expr& right() const;

  /// Number of nodes counting every path (saturates at UINT64_MAX).
  std::uint64_t node_count() const noexcept;
  /// Depth of the tree; a single terminal has depth 1.
  int depth() const noexcept;
  /// Largest variable index referenced plus one (0 when no variables).
  std::size_t arity_hint() const noexcept;

  /// Identity of the underlying node, for sharing-aware traversals.
  const void* id() const noexcept { return node_.get(); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

double analytic_quotient(double a, double b);

/// Value of the expression at one input row. Throws ShapeError if a variable
/// index is out of range and EvalError (with the node path) on a non-finite
/// result.
double evaluate(const Expr& expr, std::span<const double> row);

/// Row-ordered semantics. Throws ShapeError / EvalError with the row index.
Semantics semantics(const Expr& expr, const Matrix& inputs);

/// Like semantics() but leaves non-finite values in place instead of
/// throwing. Engines use this and turn overflow into a worst-fitness sentinel.
Semantics raw_semantics(const Expr& expr, const Matrix& inputs);

inline std::uint64_t node_count(const Expr& expr) { return expr.node_count(); }

/// Prefix S-expression: "x0", "(+ x0 0x1.3333333333333p-1)". Constants are
/// hexadecimal floats, so equal keys mean bit-identical constants.
std::string canonical_key(const Expr& expr);

/// Human readable infix rendering with shortest round-trip decimals.
std::string to_infix(const Expr& expr);

bool structurally_equal(const Expr& a, const Expr& b);

/// Node at a preorder position (0 is the root).
Expr node_at(const Expr& expr, std::uint64_t index);

/// Copy of `expr` with the subtree at preorder `index` replaced. Untouched
/// subtrees are shared with the original.
Expr replace_at(const Expr& expr, std::uint64_t index, Expr replacement);

/// Grow method. Interior positions pick a function with probability
/// 4 / (4 + d + 1); terminals are one of d variables or one ERC slot.
Expr grow(int max_depth, std::size_t num_vars, Interval erc, Rng& rng);

/// Full method: functions down to `depth`, terminals at the last level.
Expr full(int depth, std::size_t num_vars, Interval erc, Rng& rng);

/// Ramped half-and-half over depths 2..max_depth. Consecutive pairs share a
/// depth ramp; the first of each pair is grown, the second is full.
std::vector<Expr> ramped_half_and_half(std::size_t pop_size, int max_depth, std::size_t num_vars,
                                       Interval erc, Rng& rng);

const char* symbol_name(Symbol symbol) noexcept;

}  // namespace gsgp
