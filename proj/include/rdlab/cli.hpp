#ifndef RDLAB_CLI_HPP
#define RDLAB_CLI_HPP

#include <string>
#include <vector>

namespace rdlab {

// Entry point of the command-line tool; argv-style arguments without the
// program name. Returns the process exit code: 0 iff every selected
// property check passed.
int run_cli(std::vector<std::string> args);

} // namespace rdlab

#endif
