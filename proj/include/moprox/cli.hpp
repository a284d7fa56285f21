#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace moprox {

/// Parses and runs one command (args exclude the program name).
/// Subcommands: solve, critical, scan, verify. Results go to `out` as JSON
/// (plus an optional trace CSV written atomically); diagnostics go to `err`
/// as a single line. Returns the process exit code: 0 on success, 1 on
/// parse/validation/domain errors, 2 on non-convergence or failed
/// verification suites.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Same, wired to std::cout / std::cerr.
int run_cli(const std::vector<std::string>& args);

}  // namespace moprox
