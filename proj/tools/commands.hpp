#pragma once

#include <iosfwd>

namespace magicsim_cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInvariant = 3;

/// Parses argv, dispatches one subcommand and returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace magicsim_cli
