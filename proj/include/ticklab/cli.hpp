#pragma once

#include <iosfwd>

namespace ticklab::cli {

inline constexpr const char* kToolVersion = "ticklab 0.1.0";

// Exit codes: 0 success, 2 input error, 3 NoConvergence / RouteMismatch /
// partial certificate (any artifact is still written).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitIncomplete = 3;

// Entry point behind the ticklab executable; streams are injectable so the
// tests can drive every subcommand in-process.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ticklab::cli
