#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmdglm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kNotConverged = 2,
  kInternalError = 3,
};

// Entry point behind the `mmdglm` binary; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmdglm::cli
