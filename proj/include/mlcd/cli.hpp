#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlcd {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitSolver = 3,
  kExitMismatch = 4,
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlcd
