#pragma once

#include <iosfwd>

namespace fundepth::cli {

// Exit codes returned by run().
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNumericalError = 2;
inline constexpr int kUsageError = 64;

// Full command-line entry point; summary lines go to `out`, logs to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fundepth::cli
