#pragma once

// Seeded smooth test fields: truncated Fourier series over the lowest modes
// of each axis, and bump-supported variations.

#include "covep/sections.hpp"

#include <cstdint>
#include <random>

namespace covep {

/// mt19937_64 with a platform-independent mapping to doubles.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct FourierSpec {
  int modes = 3;           ///< wave numbers 0..modes-1 per axis
  double amplitude = 1.0;  ///< mode k is weighted by amplitude / (1 + |k|^2)
};

/// One scalar truncated Fourier series per component.
NodeField random_fourier_field(const MetricGrid& grid, int components, SeededRng& rng, const FourierSpec& spec);

AlgebraField random_algebra_field(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec);
ConnectionForm random_connection(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec);
AlgebraOneForm random_one_form(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec);
CoalgebraVectorField random_coalgebra_vector_field(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec);

/// s(x) = exp(xi(x)) for a random smooth algebra field xi.
GroupField random_group_field(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec);

/// C-infinity bump exp(1 - 1/(1 - r^2)) around a random centre with radius
/// `radius_fraction` of each extent. On Dirichlet grids the support stays
/// clear of the boundary nodes.
ScalarField random_bump(const MetricGrid& grid, SeededRng& rng, double radius_fraction);

/// Random smooth algebra field multiplied by a random bump.
AlgebraField random_compact_algebra_field(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec,
                                          double radius_fraction = 0.3);

}  // namespace covep
