#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lg::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNotFound = 1;  // not found, ambiguous, mismatched or missing codes
inline constexpr int kUsage = 2;
inline constexpr int kBuild = 3;  // build, integrity, format, I/O and fetch failures

/// args[0] is the program name. Data goes to `out`, notices and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lg::cli
