#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gals::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

/// Runs `gals <subcommand> ...`; args excludes the program name. Reports go to
/// `out`, usage text and log lines to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gals::cli
