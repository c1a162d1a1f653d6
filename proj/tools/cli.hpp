#pragma once

#include <string>
#include <vector>

namespace volboot::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kNumericalError = 2 };

/// Entry point of the `volboot` tool; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace volboot::cli
