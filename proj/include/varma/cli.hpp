#pragma once

#include <string>
#include <vector>

namespace varma::cli {

/// Full command-line front end.  `args` is argv without the program name.
/// Returns the process exit code: 0 success, 1 usage error, 2 compute error.
int run(const std::vector<std::string>& args);

}  // namespace varma::cli
