#pragma once

#include <iosfwd>

namespace ifdpg::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kPipelineError = 2,
  // `repro` ran to completion but at least one check failed.
  kChecksFailed = 3,
};

// Parses argv and runs one subcommand. Reports go to `out`, diagnostics to
// `err`; nothing is written to the process streams directly.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ifdpg::cli
