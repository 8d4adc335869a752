#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cro::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `cro` tool. Subcommands: run, suite, sample, pdf,
/// bench list. Returns 0 on success, 1 on runtime failure, 2 on usage or
/// configuration errors.
int main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace cro::cli
