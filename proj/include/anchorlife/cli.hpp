#pragma once

#include <string>
#include <vector>

namespace anchorlife
{

/// Exit codes of the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_data_error = 1;
inline constexpr int exit_no_root = 2;
inline constexpr int exit_usage = 64;

int run_cli(int argc, char** argv);
/// Same as above with the program name omitted from `args`.
int run_cli(const std::vector<std::string>& args);

} // namespace anchorlife
