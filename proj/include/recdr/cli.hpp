#pragma once

#include <iosfwd>

namespace recdr::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kPartialFailure = 1,  ///< simulate: some days failed
  kValidation = 2,
  kSolver = 3,
  kTooManyRequests = 4,
  kVerifyFailed = 5,
};

/// Entry point of the `recdr` tool; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Worker count from REC_DR_WORKERS, else the number of hardware threads.
int default_workers();

}  // namespace recdr::cli
