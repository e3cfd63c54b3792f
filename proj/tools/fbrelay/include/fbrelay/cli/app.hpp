#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fbrelay::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitConfigError = 2,
  kExitNumericError = 3,
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Runs the fbrelay command line. `args` excludes the program name.
/// `env` defaults to the process environment.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env = {});

}  // namespace fbrelay::cli
