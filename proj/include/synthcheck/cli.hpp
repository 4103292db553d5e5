#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace synthcheck {

/// Runs one CLI subcommand. args excludes the program name. Returns 0 on
/// success, 1 on errors and strict-mode violations, 2 on usage errors.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace synthcheck
