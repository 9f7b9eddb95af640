#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trilab {

// Runs one command-line invocation.  `args` excludes the program name.
// CSV goes to `out` unless --out redirects it to a file, in which case
// human-readable summaries (where a subcommand produces them) go to `out`
// instead; diagnostics and error lines always go to `err`.
//
// Exit codes: 0 success, 2 unknown subcommand, 3 invalid configuration or
// parameter domain, 4 degenerate estimate.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trilab
