#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace quasc::cli {

/// Runs one `quasc` subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quasc::cli
