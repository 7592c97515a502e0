#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ballflow::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationFailed = 1,
    kParseError = 2,
    kVirtualPacking = 3,
    kBoundaryHit = 4,
    kTimeLimit = 5,
    kInputError = 6,
    kConfigError = 7,
    kGeometryError = 8,
    kNotSolved = 9,
    kInternalError = 10,
    kUsage = 64,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ballflow::cli
