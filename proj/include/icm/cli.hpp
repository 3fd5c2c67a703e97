#pragma once

// Command-line front end. Exit codes: 0 success (all bounds hold), 1 a bound
// was violated, 2 usage, input or parameter-domain error.

#include <iosfwd>
#include <string>
#include <vector>

namespace icm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name. Results go to `out` (or --out files),
/// diagnostics to `err` as single lines.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace icm::cli
