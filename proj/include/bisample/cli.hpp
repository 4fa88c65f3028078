#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bisample {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,  // bad flags or unparsable input
    exit_infeasible = 2,
    exit_verify_failed = 3,
    exit_too_large = 4,
};

/// Runs the tool; `args` excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace bisample
