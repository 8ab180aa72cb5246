#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoi::cli {

/// Exit codes: 0 success, 1 user error (flags, config, size guards),
/// 2 numerical failure (non-convergence, non-finite loss).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoi::cli
