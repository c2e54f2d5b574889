#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace btsp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr int kSolveMaxN = 60;

// Runs one subcommand; args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace btsp::cli
