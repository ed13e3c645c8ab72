#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace warpzsl::cli {

/// Exit codes: 0 success, 1 I/O failure, 2 validation or usage error.
enum ExitCode : int { kOk = 0, kIoError = 1, kValidationError = 2 };

/// Runs the command line `args` (args[0] is the program name). Artifacts go
/// to the paths named by flags; JSON-lines logs go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace warpzsl::cli
