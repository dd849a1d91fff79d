#pragma once

#include <iosfwd>

namespace samp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `samp` tool. Errors are reported on `err` as a single
/// line starting with `error:`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace samp
