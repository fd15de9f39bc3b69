#pragma once

#include <iosfwd>

namespace kpbbm::cli {

// Exit codes: 0 success, 1 bad input, 2 a residual that should vanish does not.
constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kVerificationFailed = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kpbbm::cli
