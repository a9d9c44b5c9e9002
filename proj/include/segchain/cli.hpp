#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace segchain {

// Exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,      // domain or dimension errors, I/O failures
    exit_parse = 2,        // malformed input files or command lines
    exit_budget = 3,       // enumeration or trajectory budget exceeded
    exit_invariant = 4,    // a checked identity or invariant failed
};

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace segchain
