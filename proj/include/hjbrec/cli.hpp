#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hjbrec::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,  // bad arguments or unparsable input files
  kVerificationFailed = 3,
  kSingular = 4,
  kDiverged = 5,
  kNumerical = 6,
};

/// Runs `hjbrec <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hjbrec::cli
