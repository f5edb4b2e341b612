#pragma once

#include <string>
#include <vector>

namespace lse {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitNumerical = 3,
  kExitCheckFailed = 4,
};

/// Entry point of the `lse` command line tool.
int run_cli(int argc, char** argv);
int run_cli(std::vector<std::string> args);

}  // namespace lse
