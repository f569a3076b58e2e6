#pragma once

// Command-line front end. Exit codes: 0 success, 1 verification failure,
// 2 input error, 3 genericity error.

#include <iosfwd>
#include <string>
#include <vector>

namespace torusflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNotGeneric = 3;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace torusflow::cli
