#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cayrs {

/// Exit status: 0 success, 1 domain error, 2 input error or bad usage.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int runCli(int argc, char** argv);

}  // namespace cayrs
