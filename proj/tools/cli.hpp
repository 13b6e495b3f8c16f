#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hls::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2 };

// Runs one invocation; args exclude the program name. Output that would go to
// --out is written there, everything else to out/err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hls::cli
