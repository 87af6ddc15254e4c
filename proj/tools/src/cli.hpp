#pragma once

#include <iosfwd>

namespace spreadcast::cli {

/// Parses argv and runs one subcommand. Returns the process exit code:
/// 0 iff the requested artifact was fully written (or help was shown).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spreadcast::cli
