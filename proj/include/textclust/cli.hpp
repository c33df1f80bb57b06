#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace textclust {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the textclust tool. `args` excludes the program name.
// Commands: preprocess, embed, train, sweep, evaluate, selftest.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace textclust
