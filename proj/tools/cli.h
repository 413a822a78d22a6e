#ifndef PRECEDENCE_TOOLS_CLI_H_
#define PRECEDENCE_TOOLS_CLI_H_

// Entry point of the `precedence` command, callable in-process from tests.

#include <iosfwd>

namespace precedence::cli {

// Returns the process exit code: 0 success, 1 validation or usage error,
// 2 I/O error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace precedence::cli

#endif  // PRECEDENCE_TOOLS_CLI_H_
