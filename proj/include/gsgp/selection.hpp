#pragma once

#include <cstddef>
#include <limits>
#include <span>

#include "gsgp/expr.hpp"
#include "gsgp/rng.hpp"

namespace gsgp {

/// Worst-fitness sentinel for individuals whose outputs overflowed.
inline constexpr double kWorstFitness = std::numeric_limits<double>::infinity();

/// Training RMSE, or kWorstFitness if any output is non-finite.
double fitness_from_semantics(std::span<const double> outputs, std::span<const double> target);

/// Draws k indices uniformly with replacement and returns the one with the
/// lowest fitness; ties go to the earliest draw.
std::size_t tournament_select(std::span<const double> fitness, std::size_t k, Rng& rng);

/// Index of the lowest fitness; ties go to the lowest index.
std::size_t best_index(std::span<const double> fitness);

}  // namespace gsgp
