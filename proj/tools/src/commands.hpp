#pragma once

namespace tpcgcn::cli {

// Parses and runs one subcommand. Returns the process exit code:
// 0 success, 1 invalid input or arguments, 2 runtime or numeric failure.
int run(int argc, char** argv);

}  // namespace tpcgcn::cli
