#pragma once

#include <iosfwd>

namespace darbouxkit {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes: 0 ok, 1 internal failure, 2 validation error, 3 domain or parameter-constraint error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace darbouxkit
