#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elnet {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitSolver = 3,
  kExitMode = 4,
  kExitInvariant = 5,
};

/// Runs the command line `args` (program name excluded), writing CSV to `out`
/// and diagnostics to `err`; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elnet
