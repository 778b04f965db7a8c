#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace covep::cli {

enum ExitCode : int { kSuccess = 0, kNumericFailure = 1, kInputError = 2 };

/// Entry point of the covep tool:
///   covep <reduce|verify|rigid-body|harmonic|reconstruct> --config <path>
///         [--out <dir>] [--seed <u64>]
/// Messages go to `out` and `err`; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace covep::cli
