#pragma once

#include <iosfwd>

namespace mixnl {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverError = 3;

/// Entry point of the `mixnl` tool:
///   mixnl <constants|eig|sweep-neumann|sweep-dirichlet|bifurcate|verify>
///         [--config PATH] [--out DIR] [--h H] [--seed N] [--s S]
/// Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace mixnl
