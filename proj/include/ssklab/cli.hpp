#pragma once

#include <iosfwd>

namespace ssklab {

// Runs one ssklab command line. JSON/CSV results go to `out`, diagnostics to
// `err`. Returns 0 on success, 1 on invalid input, 2 on numeric failure.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ssklab
