#pragma once

// Command implementations behind the CLI front end. Each command takes a
// versioned JSON config (unknown fields rejected, missing fields take
// defaults, the effective config is echoed into the output metadata) and
// produces CSV or JSON text. Exit codes: 0 success, 2 config error,
// 3 numerical failure.

#include <string>

#include <json.hpp>

namespace pertkit::cli {

struct CommandResult {
    int exit_code = 0;
    std::string output;      // CSV or JSON payload
    std::string error_json;  // machine-readable error (empty on success)
};

// command is one of: series, sweep, borel, saddle, sd, extend, rgflow, report
CommandResult run_command(const std::string& command, const nlohmann::json& config);

bool known_command(const std::string& command);
std::string command_list();

}  // namespace pertkit::cli
