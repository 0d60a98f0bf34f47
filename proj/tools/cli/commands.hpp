#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace rarequant::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kDataError = 3,
    kIncompatible = 4,
};

// Runs one command line (args excludes the program name). Never throws;
// failures become an exit code plus a message on err.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace rarequant::cli
