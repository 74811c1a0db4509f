#pragma once

#include <iosfwd>

namespace quadlab::harness {

// Exit status: 0 success, 1 usage error, 2 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace quadlab::harness
