#pragma once

#include <string>
#include <vector>

namespace gvecf {

// Command-line entry point (also callable in-process from tests). Returns the
// process exit code: 0 on success, non-zero with a diagnostic on stderr.
int cli_run(int argc, const char* const* argv);
int cli_run(const std::vector<std::string>& args);  // args[0] = program name

}  // namespace gvecf
