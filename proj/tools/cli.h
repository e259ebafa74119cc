#pragma once

#include <string>
#include <vector>

namespace kfuse::cli {

// Exit codes: 0 success, 1 internal error, 2 input or validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

int run(int argc, char** argv);
// `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace kfuse::cli
