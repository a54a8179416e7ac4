#pragma once

#include <string>
#include <vector>

namespace oobgini::cli {

// Entry point behind the oobgini binary. Exit codes: 0 success, 1 domain
// error (bad data, missing file, invalid configuration), 2 usage error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace oobgini::cli
