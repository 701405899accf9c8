#pragma once

#include <string>
#include <vector>

namespace qgnn::cli {

/// Parse and run one command. Exposed as a library call so replay tests can
/// drive the exact binary surface in-process. Returns the process exit code.
int run(const std::vector<std::string> &args);

} // namespace qgnn::cli
