#pragma once

namespace fcmli {

/// Command-line entry point. Subcommands: simulate, gen-dataset, split,
/// train, eval, run-recipe, thd, compare. Returns a process exit status.
int run_cli(int argc, const char* const* argv);

}  // namespace fcmli
