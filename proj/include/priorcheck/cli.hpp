#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace priorcheck::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kInvalidInput = 2;
inline constexpr int kInfeasible = 3;

// Entry point behind the `priorcheck` executable. `args` excludes the program
// name. Subcommands: run, calibrate, sample.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace priorcheck::cli
