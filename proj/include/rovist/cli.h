#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rovist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitItemFailures = 1;
inline constexpr int kExitConfigError = 2;

// Runs the `rovist` command line. args[0] is the program name. Data goes to
// `out` (unless redirected with --out), progress and errors to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int RunMain(int argc, char** argv);

}  // namespace rovist::cli
