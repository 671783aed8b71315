#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hiercode::cli {

/// Runs the command line; args excludes the program name. Returns the exit
/// status: 0 success, 1 domain or usage error, 2 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hiercode::cli
