#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iskew::cli {

enum ExitCode : int { kOk = 0, kInvalidInput = 2, kComputationFailed = 3 };

/// Runs one command line (without the program name). CSV goes to --out or `out`;
/// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iskew::cli
