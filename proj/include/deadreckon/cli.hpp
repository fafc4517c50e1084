#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deadreckon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point behind the `deadreckon` executable. argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace deadreckon::cli
