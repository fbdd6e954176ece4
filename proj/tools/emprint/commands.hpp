#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace emprint::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kInputError = 2,
  kDegenerateBasis = 3,
  kInterpolantFailure = 4,
};

/// Discrepancy bound for `verify-theorem`.
inline constexpr double kTheoremTolerance = 1e-7;

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Progress goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emprint::cli
