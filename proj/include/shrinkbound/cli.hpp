#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shrinkbound::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kNumericalError = 3,
};

// Runs the command line `shrinkbound <args...>` (args exclude the program
// name) and returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shrinkbound::cli
