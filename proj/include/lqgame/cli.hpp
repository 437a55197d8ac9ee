#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lqgame::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPartial = 2;

/// Full command-line entry point: parses args (excluding the program name),
/// dispatches the subcommand, writes the report (JSON) or CSV to out and
/// diagnostics to err. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lqgame::cli
