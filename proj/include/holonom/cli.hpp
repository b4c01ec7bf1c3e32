#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holonom::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // honest algorithmic failure
inline constexpr int kExitUsage = 2;    // bad input or flags

// Runs `holonom <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holonom::cli
