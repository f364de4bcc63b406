#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sclba::cli {

/// Runs the `sclba` command line. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 numerical failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sclba::cli
