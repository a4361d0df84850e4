#pragma once

#include <iosfwd>

namespace esoform {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitNoSpanningTree = 4,
  kExitNumerical = 5,
};

/// Entry point for the `esoform` command line (design, simulate, analyze,
/// sweep, preset). Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace esoform
