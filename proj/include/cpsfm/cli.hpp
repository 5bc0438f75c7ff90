#ifndef CPSFM_CLI_HPP
#define CPSFM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cpsfm {

/// Runs the command-line front end. `args` excludes the program name.
/// Returns the process exit status; failures print one line
/// "error: <code>: <message>" to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cpsfm

#endif
