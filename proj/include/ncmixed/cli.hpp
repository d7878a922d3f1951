#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ncmixed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (convergence, element-report, verify, solve). args
/// excludes the program name. Returns 0 on success, 1 when a check or solve
/// fails, 2 on a usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncmixed
