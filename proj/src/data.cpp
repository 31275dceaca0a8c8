#include "gsgp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "gsgp/errors.hpp"
#include "gsgp/rng.hpp"

namespace gsgp {

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Matrix x(rows.size(), features.cols());
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    for (std::size_t j = 0; j < features.cols(); ++j) x(i, j) = features(r, j);
    y[i] = target[r];
  }
  return Dataset{std::move(x), std::move(y), name, source_columns};
}

std::vector<std::size_t> FoldAssignment::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i)
    if (fold_of_row[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldAssignment::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i)
    if (fold_of_row[i] != fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto f : fold_of_row) ++sizes[f];
  return sizes;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& name, std::optional<std::size_t> target_column) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> values;
    values.reserve(cells.size());
    std::optional<std::size_t> bad_column;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto v = parse_number(cells[c]);
      if (!v) {
        bad_column = c;
        break;
      }
      values.push_back(*v);
    }
    if (!header_checked) {
      header_checked = true;
      if (bad_column) {
        width = cells.size();
        continue;
      }
    }
    if (bad_column) {
      throw DataError(fmt::format("{}: non-numeric cell '{}' at line {}, column {}", name, cells[*bad_column],
                                  line_no, *bad_column + 1));
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw DataError(fmt::format("{}: line {} has {} column(s), expected {}", name, line_no, values.size(), width));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError(fmt::format("{}: no data rows", name));
  if (width < 2) throw DataError(fmt::format("{}: need at least one feature column and a target", name));
  const std::size_t target = target_column.value_or(width - 1);
  if (target >= width) {
    throw DataError(fmt::format("{}: target column {} out of range ({} columns)", name, target, width));
  }

  Matrix x(rows.size(), width - 1);
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t j = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == target) {
        y[i] = rows[i][c];
      } else {
        x(i, j++) = rows[i][c];
      }
    }
  }
  return Dataset{std::move(x), std::move(y), name, width};
}

Dataset load_csv(const std::filesystem::path& path, std::optional<std::size_t> target_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open dataset '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto text = buffer.str();
  if (trim(text).empty()) throw DataError(fmt::format("{}: empty file", path.string()));
  return parse_csv(text, path.stem().string(), target_column);
}

FoldAssignment kfold_split(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  const auto n = dataset.size();
  if (k < 2) throw ConfigError("k-fold split needs k >= 2");
  if (k > n) throw ConfigError(fmt::format("k-fold split: k = {} exceeds n = {}", k, n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
  FoldAssignment folds{std::vector<std::size_t>(n), k};
  for (std::size_t i = 0; i < n; ++i) folds.fold_of_row[order[i]] = i % k;
  return folds;
}

nlohmann::json to_json(const FoldAssignment& folds) {
  return nlohmann::json{{"k", folds.k}, {"fold_of_row", folds.fold_of_row}, {"fold_sizes", folds.fold_sizes()}};
}

double target_std(std::span<const double> target) {
  const auto n = target.size();
  if (n < 2) throw std::invalid_argument("target_std needs at least 2 values");
  const double mean = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double y : target) ss += (y - mean) * (y - mean);
  return std::sqrt(ss / static_cast<double>(n));
}

double target_std(const Dataset& dataset) { return target_std(dataset.target); }

double rmse(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size()) {
    throw std::invalid_argument(fmt::format("rmse: length mismatch ({} vs {})", predicted.size(), target.size()));
  }
  if (target.empty()) throw std::invalid_argument("rmse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = predicted[i] - target[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(target.size()));
}

Dataset make_synthetic(const std::string& problem, std::size_t n, std::uint64_t seed, double noise) {
  if (n == 0) throw ConfigError("synthetic dataset needs n >= 1");
  std::size_t d = 0;
  if (problem == "mul-add" || problem == "ratio") {
    d = 3;
  } else if (problem == "poly") {
    d = 2;
  } else {
    throw ConfigError(fmt::format("unknown synthetic problem '{}'", problem));
  }
  Rng rng(seed);
  Matrix x(n, d);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    if (problem == "mul-add") {
      y[i] = x(i, 0) * x(i, 1) + x(i, 2);
    } else if (problem == "poly") {
      y[i] = x(i, 0) * x(i, 0) * x(i, 0) - 0.5 * x(i, 1) * x(i, 1) + x(i, 0);
    } else {
      y[i] = x(i, 0) / (1.0 + x(i, 1) * x(i, 1)) + 0.3 * x(i, 2);
    }
    if (noise > 0.0) y[i] += noise * rng.normal();
  }
  return Dataset{std::move(x), std::move(y), "synthetic-" + problem, 0};
}

Dataset load_dataset(const std::string& spec, std::optional<std::size_t> target_column, std::uint64_t synthetic_seed) {
  constexpr std::string_view prefix = "synthetic:";
  if (!spec.starts_with(prefix)) return load_csv(spec, target_column);
  std::vector<std::string> parts;
  std::stringstream ss(spec.substr(prefix.size()));
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.empty() || parts[0].empty()) throw DataError("synthetic dataset spec needs a problem name");
  std::size_t n = 200;
  double noise = 0.0;
  try {
    if (parts.size() > 1) n = std::stoul(parts[1]);
    if (parts.size() > 2) noise = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw DataError(fmt::format("malformed synthetic dataset spec '{}'", spec));
  }
  try {
    return make_synthetic(parts[0], n, synthetic_seed, noise);
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
}

}  // namespace gsgp
