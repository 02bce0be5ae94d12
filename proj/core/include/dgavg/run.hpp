#pragma once

// Command execution behind the dgavg tool.

#include <dgavg/config.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace dgavg {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;  // assertion or solver failure
inline constexpr int kExitConfig = 2;   // invalid configuration

/// Executes a validated configuration, writing <output>.csv and
/// <output>.summary (plus command-specific files). Returns an exit code.
int run(const RunConfig& config, std::ostream& log);

/// Full command line handling: `--config <file>` loads a key=value file,
/// remaining arguments are parsed by parse_config. Errors map to exit codes.
int run_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string usage();

}  // namespace dgavg
