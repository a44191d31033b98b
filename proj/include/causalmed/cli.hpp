#ifndef CAUSALMED_CLI_HPP
#define CAUSALMED_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace causalmed {

// Runs the command-line front end in-process. `args` excludes the program
// name. Reports go to `out`, diagnostics to `err`. Returns the process exit
// code: 0 success, 1 domain error, 2 usage or parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causalmed

#endif  // CAUSALMED_CLI_HPP
