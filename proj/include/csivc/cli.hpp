#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csivc::cli {

enum ExitCode : int {
  success = 0,
  validation_error = 2,
  io_error = 3,
  estimation_failure = 4,
};

inline constexpr const char* version = "0.1.0";

// Entry point shared by the executable and the tests; args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csivc::cli
