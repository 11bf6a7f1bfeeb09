#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tricorr::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kPrecondition = 2, kAssertFailed = 3 };

// Runs one command line. Reports go to --out (or `out`), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tricorr::cli
