#pragma once
// In-process command-line front end. The binary's main() is a thin wrapper
// around run_cli so every subcommand, flag and exit path is unit-testable
// against string streams.
//
// Exit codes: 0 success, 1 configuration/validation/parse failure (including
// bad flags), 2 numerical failure (the message carries the module error
// kind).

#include <iosfwd>
#include <string>
#include <vector>

namespace leo {

// `args` excludes the program name. Tabular results go to `out` (or the file
// given with --out); diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace leo
