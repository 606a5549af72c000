#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geomcoder::cli {

// Runs one CLI invocation (args exclude the program name). Returns the exit
// status: 0 success, 1 domain failure, 2 usage/parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geomcoder::cli
