#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsgp {

/// A variable index in an expression does not fit the input row width.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation produced a non-finite value. Carries the node path (from the
/// root, e.g. "root.left.right") and the row at which it happened.
class EvalError : public std::runtime_error {
 public:
  EvalError(std::string path, std::size_t row, const std::string& what)
      : std::runtime_error(what), path_(std::move(path)), row_(row) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::string path_;
  std::size_t row_;
};

/// Malformed or unreadable dataset input.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid engine, suite or command-line configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Materializing an individual would exceed the requested node budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(std::string exact_size, const std::string& what)
      : std::runtime_error(what), exact_size_(std::move(exact_size)) {}

  /// Decimal rendering of the individual's exact node count.
  const std::string& exact_size() const noexcept { return exact_size_; }

 private:
  std::string exact_size_;
};

}  // namespace gsgp
