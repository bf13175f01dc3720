#pragma once

#include <iosfwd>

namespace pricelab {

/// Entry point of the `pricelab` tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pricelab
