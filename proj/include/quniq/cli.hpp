#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quniq {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 2,    // bad flags, config or input files
    kExitWeight = 3,     // Divergent, Undecidable, InvalidWeight, NotLogConvex
    kExitNmax = 4,       // ExceedsNmax
    kExitSingular = 5,   // singular experiment under --require-positive
};

/// Runs one subcommand; `args` excludes the program name. Reports go to `out`
/// (or to --out), diagnostics to `err`. Nothing is written to the report
/// destination when the command fails.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quniq
