#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace evacast::interfaces {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitRuntime = 3 };

// ParseError / ValidationError / malformed JSON / missing files -> 2,
// TrainingError and anything else -> 3.
int exit_code_for(const std::exception& e);

// args excludes the program name. Reports go to out, progress and errors to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace evacast::interfaces
