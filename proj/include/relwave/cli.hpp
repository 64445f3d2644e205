#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relwave {

enum ExitCode : int { exit_ok = 0, exit_runtime = 1, exit_usage = 2, exit_verification = 3 };

/// Entry point for `relwave <subcommand> ...`; args exclude the program name.
/// Subcommands: transverse | effective | strip | verify | validate-curve.
/// Each honors --out PATH, --format csv|json, --verbose and --config PATH.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relwave
