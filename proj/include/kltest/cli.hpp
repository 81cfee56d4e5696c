#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kltest {

/// Parses and dispatches one command line (without the program name).
/// Returns 0 on success, 2 on usage errors, 1 on domain/input errors.
/// Human-readable summary goes to `out`, machine-readable CSV/JSON artifacts
/// to the --out path when given.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace kltest
