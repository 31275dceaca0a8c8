#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gsgp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;

/// Entry point of the gsgpred tool. `args` excludes the program name.
/// Subcommands: run, bench, analyze-growth, verify-equivalence, expected-size.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsgp
