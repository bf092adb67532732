// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mocha::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,    ///< selftest failure or unexpected internal error
  kBadInput = 2,   ///< dimension, configuration, or numeric precondition error
  kIoError = 3,    ///< unreadable/unwritable file or malformed file format
  kUsage = 4,      ///< command line could not be parsed
};

/// Runs the command line `args` (args[0] is the program name). Normal
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mocha::cli
