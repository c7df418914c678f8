#pragma once

#include <iosfwd>

namespace essograph {

// Entry point for the `essograph` command-line tool.  Parses `argv`,
// dispatches to one of the subcommands (learn, synth, audit) and writes
// human-facing output to `out` / diagnostics to `err`.
//
// Exit codes: 0 success, 1 audit found violations, 2 usage or input error,
// 3 unrecoverable structural conflict during repair.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace essograph
