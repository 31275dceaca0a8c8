#include "gsgp/config.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gsgp/bigint.hpp"
#include "gsgp/errors.hpp"

namespace gsgp {

std::string_view engine_name(EngineKind kind) noexcept {
  switch (kind) {
    case EngineKind::Gp: return "gp";
    case EngineKind::Gsgp: return "gsgp";
    case EngineKind::GsgpRed: return "gsgp-red";
  }
  return "?";
}

EngineKind parse_engine(std::string_view name) {
  if (name == "gp") return EngineKind::Gp;
  if (name == "gsgp") return EngineKind::Gsgp;
  if (name == "gsgp-red") return EngineKind::GsgpRed;
  throw ConfigError(fmt::format("unknown engine '{}' (expected gp, gsgp or gsgp-red)", name));
}

EvolutionConfig EvolutionConfig::defaults(EngineKind kind) {
  EvolutionConfig config;
  if (kind != EngineKind::Gp) {
    config.tournament_size = 10;
    config.p_crossover = 0.5;
    config.p_mutation = 0.5;
  }
  return config;
}

void EvolutionConfig::validate() const {
  if (pop_size < 2) throw ConfigError("population size must be at least 2");
  if (tournament_size < 1 || tournament_size > pop_size) {
    throw ConfigError(fmt::format("tournament size must be in [1, {}]", pop_size));
  }
  if (!(p_crossover >= 0.0 && p_crossover <= 1.0 && p_mutation >= 0.0 && p_mutation <= 1.0)) {
    throw ConfigError("operator probabilities must lie in [0, 1]");
  }
  if (std::abs(p_crossover + p_mutation - 1.0) > 1e-9) {
    throw ConfigError("crossover and mutation probabilities must sum to 1");
  }
  if (max_depth < 2) throw ConfigError("max depth must be at least 2");
  if (!std::isfinite(erc.lo) || !std::isfinite(erc.hi) || erc.lo > erc.hi) {
    throw ConfigError("ERC range must be finite with lo <= hi");
  }
  if (!(ms_fraction > 0.0) || !std::isfinite(ms_fraction)) throw ConfigError("mutation step fraction must be positive");
  if (node_budget == 0) throw ConfigError("node budget must be positive");
}

nlohmann::json to_json(const EvolutionConfig& c) {
  return nlohmann::json{{"pop_size", c.pop_size},       {"generations", c.generations},
                        {"tournament_size", c.tournament_size}, {"p_crossover", c.p_crossover},
                        {"p_mutation", c.p_mutation},   {"max_depth", c.max_depth},
                        {"erc", {c.erc.lo, c.erc.hi}},  {"ms_fraction", c.ms_fraction},
                        {"seed", c.seed},               {"node_budget", c.node_budget}};
}

BigInt parse_decimal(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument(fmt::format("not a non-negative integer: '{}'", text));
  }
  return BigInt(text);
}

// GCC 11 reports a spurious overflow inside boost's cpp_int right shift.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wstringop-overflow"
#pragma GCC diagnostic ignored "-Wstringop-overread"
#endif
double log10_of(const BigInt& value) {
  if (value <= 0) return -HUGE_VAL;
  const auto bits = boost::multiprecision::msb(value);
  if (bits < 960) return std::log10(value.convert_to<double>());
  const auto shift = bits - 60;
  const BigInt top = value >> shift;
  return std::log10(top.convert_to<double>()) + static_cast<double>(shift) * std::log10(2.0);
}
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

double to_double(const BigInt& value) {
  if (value > 0 && boost::multiprecision::msb(value) >= 1024) return HUGE_VAL;
  return value.convert_to<double>();
}

}  // namespace gsgp
