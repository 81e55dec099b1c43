#pragma once

#include <string>
#include <vector>

namespace dichotomy::cli {

/// Exit taxonomy: 0 = pass/success, 1 = well-formed negative verdict
/// (failed verification, obstruction, inadmissible inputs to a theorem),
/// 2 = usage or input error. A JSON report is produced in every case.
struct CommandResult {
    int exit_code = 0;
    std::string report;       // JSON text
    bool wrote_file = false;  // true when --out consumed the report
};

/// Runs one subcommand (args exclude the program name). Never throws;
/// errors are folded into the report and the exit code.
CommandResult run_command(const std::vector<std::string>& args);

}  // namespace dichotomy::cli
