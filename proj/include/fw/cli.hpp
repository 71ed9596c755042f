#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fw::cli {

enum ExitCode : int {
  ok = 0,
  config_error = 2,
  precondition_violation = 3,
  non_convergence = 4,
};

/// Runs one `fwx` invocation. `args` excludes the program name. Results go to `out`,
/// diagnostics and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fw::cli
