#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tcov/lag_stats.hpp"

namespace tcov {

// Entry point of the command line harness; `args` excludes the program name.
// Returns 0 on success, 1 for configuration/usage errors, 2 for runtime
// failures.  All output goes through the supplied streams so tests can run
// the CLI in-process.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Parse a samples file: one observation per row, comma-separated, all rows of
// equal width.  A leading non-numeric row is treated as a header and skipped.
SampleSet read_samples_csv(const std::string& path);

}  // namespace tcov
