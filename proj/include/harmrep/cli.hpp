#pragma once

namespace harmrep {

// Parses argv, runs the requested subcommand and returns the process exit status.
int dispatch(int argc, char** argv);

}  // namespace harmrep
