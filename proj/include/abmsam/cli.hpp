#pragma once

// Batch front end: validate, deploy, run, compare, report.

#include <iosfwd>
#include <string>
#include <vector>

namespace abmsam {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abmsam
