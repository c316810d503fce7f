#pragma once

#include <iosfwd>

namespace mot {

// Entry point of the `mot` tool. Returns the process exit code; reports and
// summaries go to `out`, errors to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mot
