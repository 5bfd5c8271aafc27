#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace npfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one CLI invocation. args excludes the program name. Regular output
/// goes to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace npfuse::cli
