#pragma once

#include <string>
#include <vector>

namespace lppl::cli {

/// Runs the command-line application. `args` excludes the program name.
/// Returns the process exit status: 0 success, 1 input or configuration
/// error, 2 computation failure.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

} // namespace lppl::cli
