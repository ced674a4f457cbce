#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specreg::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kNumericalFailure = 2;
inline constexpr int kCheckFailed = 3;

// Subcommands: decompose, penalty-table, select, bench, check.
// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specreg::cli
