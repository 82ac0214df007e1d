#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gateminer::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kBadInput = 4,
  kAnalysis = 5,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from GATEMINER_THREADS, else hardware concurrency (min 1).
unsigned worker_count();

}  // namespace gateminer::cli
