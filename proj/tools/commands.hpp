#pragma once

#include <string>
#include <vector>

namespace textgat::cli {

// Parses and runs one invocation; returns the process exit code.
int run(const std::vector<std::string>& argv);

}  // namespace textgat::cli
