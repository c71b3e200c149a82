#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tavc {

// Entry point of the `tavc` command-line tool. args[0] is the program name.
// Reads streams from `in` unless --input is given and writes CSV to `out`
// unless --out is given; diagnostics go to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace tavc
