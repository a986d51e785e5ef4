#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace addsel::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadInput = 2,
  kBudgetExceeded = 3,
  kNotConverged = 4,
};

/// Runs the command line `args` (without the program name). Diagnostics go
/// to `err`, short summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace addsel::cli
