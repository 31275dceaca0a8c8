#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace gsgp {

/// Exact node counts. GSGP individuals exceed 2^64 after ~60 crossover
/// generations.
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_decimal(const BigInt& value) { return value.str(); }

/// Parses a non-negative decimal string. Throws std::invalid_argument.
BigInt parse_decimal(const std::string& text);

/// log10 of a positive value; -inf for zero.
double log10_of(const BigInt& value);

/// Nearest double (may be +inf beyond DBL_MAX).
double to_double(const BigInt& value);

}  // namespace gsgp
