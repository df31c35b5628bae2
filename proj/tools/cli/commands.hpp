#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace diffnet::cli {

// Process exit codes; scripts rely on these values.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitNotConverged = 3,
};

// Entry point shared by the executable and the integration tests. `args`
// excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace diffnet::cli
