// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pulsecal::cli {

enum ExitCode : int {
    kAccept = 0,
    kGateReject = 1,
    kAlignmentFail = 2,
    kParseOrConfigError = 3,
};

/// Runs one command line (args excludes the program name). Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace pulsecal::cli
