#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace myo::cli {

/// Process exit statuses, one per failure category.
enum ExitCode : int {
    ok = 0,
    other_error = 1,
    usage_error = 2,
    config_error = 3,
    format_error = 4,
    data_error = 5,  ///< geometry, shape or degenerate input
    training_error = 6,
    baseline_error = 7,
};

/// Runs one subcommand. `args` excludes the program name. Human-readable
/// summaries go to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace myo::cli
