#pragma once

#include <iosfwd>

namespace nettax::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

/// Entry point for the `nettax` tool: subcommands analyze, fig2, simulate,
/// sweep and init. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nettax::cli
