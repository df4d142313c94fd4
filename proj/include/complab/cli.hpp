#pragma once

#include <string>
#include <vector>

namespace complab::cli {

// Exit codes: 0 success, 2 I/O failure, 3 config/validation failure,
// 4 internal invariant violation.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // without program name

}  // namespace complab::cli
