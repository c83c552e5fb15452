#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sng {

inline constexpr const char* kVersion = "sng 1.0.0";

/// Exit codes of the command-line front end.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int usage = 2;
inline constexpr int no_bracket = 3;
inline constexpr int not_converged = 4;
inline constexpr int step_rejected = 5;
}  // namespace exit_code

/// Runs one CLI invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sng
