#pragma once

#include "covep/cli/config.hpp"

#include <filesystem>
#include <iosfwd>

namespace covep::cli {

/// Every command writes its artifacts below `out_dir` and returns an exit
/// code. Input problems throw InputError, numeric aborts NumericalError.
int cmd_reduce(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_rigid_body(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_harmonic(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_reconstruct(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace covep::cli
