#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epictrl::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kSolver = 3,
  kOutOfRegime = 4,
};

// Splices `--config file.json` entries into the argument list ahead of the
// user's own flags. Keys already given on the command line are skipped, so
// flags win over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

// Entry point of the epictrl tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epictrl::cli
