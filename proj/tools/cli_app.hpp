#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace frogsim::cli {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace frogsim::cli
