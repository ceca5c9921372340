#pragma once

#include <iosfwd>

namespace schatten::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertionFailed = 1;
inline constexpr int kExitConfigError = 2;

/// Entry point of the `schatten` tool:
///   schatten <verify|scale|clip|refine|constants> --config PATH [--out DIR]
///            [--seed INT] [--max-dim INT] [--timings]
/// Writes <DIR>/<subcommand>.csv and <DIR>/<subcommand>.json.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace schatten::cli
