#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pdfm::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

// Runs one pdfm subcommand. args[0] is the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pdfm::cli
