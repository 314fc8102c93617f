#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace grafcet {

// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitDiagnostics = 1,
  kExitGateFailed = 2,
  kExitModelError = 3,
  kExitLimit = 4,
};

/// Runs `grafcet check|analyze FILE [flags]`; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grafcet
