#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace videnergy::cli {

enum ExitCode : int { ok = 0, validation_error = 1, usage_error = 2 };

/// Runs one invocation. `args` excludes the program name. The artifact goes
/// to `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace videnergy::cli
