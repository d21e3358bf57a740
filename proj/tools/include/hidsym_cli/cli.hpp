#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hidsym::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInputError = 2, kInternalError = 3 };

/// Runs one invocation. Reports go to `out` one JSON object per line,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hidsym::cli
