#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcap::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_not_converged = 2;
inline constexpr int exit_usage = 64;
inline constexpr int exit_data = 65;

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace qcap::cli
