#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace p4bft::cli {

enum ExitCode : int {
  kOk = 0,
  kSpecError = 2,
  kInfeasible = 3,
  kDegraded = 4,
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace p4bft::cli
