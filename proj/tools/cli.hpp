#pragma once

// Command-line front end. run_cli is a plain function so tests can drive it
// with captured streams.
//
// Exit codes: 0 success, 2 protocol ran and was inconclusive, 1 usage or
// validation error (one line "error: <reason>" on the error stream).

#include <iosfwd>
#include <string>
#include <vector>

namespace diqv::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diqv::cli
