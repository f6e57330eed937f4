#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gdmd {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitValidation = 3,
    kExitNumeric = 4,
};

/// Runs the gdmd command line (subcommands gen, ip, specgram, fit, select,
/// diag) against the given argument list, without the program name.
/// Returns the process exit code; never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gdmd
