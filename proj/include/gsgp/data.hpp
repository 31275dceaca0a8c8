#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsgp/matrix.hpp"

namespace gsgp {

/// Feature matrix plus target. n >= 1, d >= 1, all values finite.
struct Dataset {
  Matrix features;
  std::vector<double> target;
  std::string name;
  /// Column count of the source file (features + target); 0 when synthetic.
  std::size_t source_columns = 0;

  std::size_t size() const noexcept { return target.size(); }
  std::size_t num_features() const noexcept { return features.cols(); }

  /// Rows in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Which fold each row belongs to.
struct FoldAssignment {
  std::vector<std::size_t> fold_of_row;
  std::size_t k = 0;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Loads a numeric CSV. A first row that does not parse as numbers is treated
/// as a header. `target_column` defaults to the last column.
Dataset load_csv(const std::filesystem::path& path, std::optional<std::size_t> target_column = std::nullopt);

/// Parses CSV text; `name` is used in error messages and the dataset name.
Dataset parse_csv(const std::string& text, const std::string& name,
                  std::optional<std::size_t> target_column = std::nullopt);

/// Seeded Fisher-Yates shuffle followed by round-robin fold assignment.
FoldAssignment kfold_split(const Dataset& dataset, std::size_t k, std::uint64_t seed);

nlohmann::json to_json(const FoldAssignment& folds);

/// Population standard deviation (divisor n). Requires n >= 2.
double target_std(const Dataset& dataset);
double target_std(std::span<const double> target);

/// Root mean square error. Throws std::invalid_argument on length mismatch or
/// empty input.
double rmse(std::span<const double> predicted, std::span<const double> target);

/// Built-in synthetic regression problems, all over features drawn from
/// U[-1, 1):
///   "mul-add"   y = x0*x1 + x2            (d = 3)
///   "poly"      y = x0^3 - 0.5*x1^2 + x0  (d = 2)
///   "ratio"     y = x0 / (1 + x1^2) + 0.3*x2 (d = 3)
/// Gaussian noise with standard deviation `noise` is added to the target.
Dataset make_synthetic(const std::string& problem, std::size_t n, std::uint64_t seed, double noise = 0.0);

/// Resolves "synthetic:<problem>[:n[:noise]]" or a CSV path.
Dataset load_dataset(const std::string& spec, std::optional<std::size_t> target_column = std::nullopt,
                     std::uint64_t synthetic_seed = 7);

}  // namespace gsgp
