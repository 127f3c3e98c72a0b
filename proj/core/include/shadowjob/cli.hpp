#pragma once

#include <string>
#include <vector>

namespace shadowjob {

/// Runs one CLI invocation. args excludes the program name.
/// Exit codes: 0 success, 1 validation error, 2 usage error.
int cli_run(const std::vector<std::string>& args);

int cli_run(int argc, char** argv);

} // namespace shadowjob
