#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace recordminer::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kPipeline = 2,
    kIo = 3,
};

/// Entry point behind the `recordminer` binary. `args[0]` is the program
/// name. Streams are parameters so tests can drive it in-process.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace recordminer::cli
