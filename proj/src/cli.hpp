#pragma once
// Command-line entry point shared by the binary and the tests. Subcommands:
// generate, prune, semigroup, generator-check, cutdown, converge, gw-shapes.
// Exit codes: 0 success, 2 usage, 3 validation, 4 runtime.

namespace bimt {

int run_cli(int argc, const char* const* argv);

}  // namespace bimt
