#pragma once

#include <string>
#include <vector>

namespace hgr::cli {

// Entry point behind the hgr binary; also callable in-process from tests.
// Returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

}  // namespace hgr::cli
