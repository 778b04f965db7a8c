#pragma once

// Run configuration of the covep tool. The accepted document is described by
// docs/config.schema.json; parse_config enforces the same rules and names
// the offending field (as a JSON path) in every InputError.

#include "covep/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace covep::cli {

struct GroupSection {
  std::string name;
  std::optional<AlgebraMatrix> h;
};

struct LagrangianSection {
  /// "harmonic" (analytic fiber derivative) or "harmonic_fd" (same density,
  /// fiber derivative by central differences).
  std::string kind = "harmonic";
};

struct ConnectionSection {
  std::string family = "zero";  ///< "zero" or "fourier"
  FourierSpec spec{3, 1.0};
  std::optional<std::uint64_t> seed;
};

struct ReduceSection {
  std::optional<std::filesystem::path> input;
};

struct VerifySection {
  int trials = 5;
  double field_amplitude = 0.5;
  double test_amplitude = 0.125;
  bool compact_eta = true;
  double support_radius = 0.3;
  std::vector<int> grid_ladder{32, 64, 128};
  double eps = 1e-4;
  std::map<std::string, double> tolerances;
  std::optional<std::pair<double, double>> flatness_order;
};

struct RigidBodySection {
  std::vector<double> mu0{1.0, 1.0, 1.0};
  double dt = 1e-3;
  double t_end = 10.0;
  int output_every = 100;
  double drift_tol = 1e-8;
};

struct HarmonicSection {
  std::string problem = "relax_random";  ///< dirichlet_quadratic | su2_geodesic | relax_random
  std::vector<double> xi0;
  double perturbation = 0.3;
  double field_amplitude = 0.5;
};

struct ReconstructSection {
  std::optional<std::filesystem::path> input;
  std::vector<int> base_node;
  std::vector<double> base_value;
  double flatness_tol = 1e-3;
};

struct RunConfig {
  std::uint64_t seed = 0;
  GroupSection group;
  std::optional<GridConfig> grid;
  LagrangianSection lagrangian;
  ConnectionSection connection;
  DescentOptions solver;
  ReduceSection reduce;
  VerifySection verify;
  RigidBodySection rigid_body;
  HarmonicSection harmonic;
  ReconstructSection reconstruct;
  /// Directory of the config file; relative input paths resolve against it.
  std::filesystem::path base_dir;
};

/// Known tolerance names of the verify suite.
const std::vector<std::string>& verify_check_names();

RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file. Throws InputError on I/O, syntax or
/// validation failures.
RunConfig load_config(const std::filesystem::path& path);

GroupModel make_group(const RunConfig& cfg);
ReducedLagrangian make_lagrangian(const RunConfig& cfg);

}  // namespace covep::cli
