#pragma once

#include <iosfwd>

namespace ddc::experiment {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `ddc` executable:
///   ddc run <config> [--seed N] [--out DIR] [--gamma X] [--override key=value]...
/// Returns the process exit code. Failures print a one-line JSON error record
/// to `err` and, when the output directory is known, write error.json there.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ddc::experiment
