#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace switchsync {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // verification, feasibility or divergence
inline constexpr int kExitUsage = 2;

/// Subcommands: synthesize, verify, simulate. args[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace switchsync
