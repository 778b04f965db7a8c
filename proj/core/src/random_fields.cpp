#include "covep/random_fields.hpp"

#include "covep/errors.hpp"

#include <cmath>
#include <numbers>

namespace covep {

NodeField random_fourier_field(const MetricGrid& grid, int components, SeededRng& rng, const FourierSpec& spec) {
  if (spec.modes < 1) throw ContractViolation("random_fourier_field: need at least one mode");
  const int n = grid.dims();
  int mode_count = 1;
  for (int a = 0; a < n; ++a) mode_count *= spec.modes;

  NodeField out(grid.node_count(), components);
  for (int c = 0; c < components; ++c) {
    for (int mode = 0; mode < mode_count; ++mode) {
      MultiIndex k{0, 0, 0};
      int rest = mode;
      double k2 = 0.0;
      for (int a = 0; a < n; ++a) {
        k[static_cast<std::size_t>(a)] = rest % spec.modes;
        rest /= spec.modes;
        k2 += static_cast<double>(k[static_cast<std::size_t>(a)] * k[static_cast<std::size_t>(a)]);
      }
      const double weight = spec.amplitude / (1.0 + k2);
      const double ca = weight * rng.uniform(-1.0, 1.0);
      const double sa = weight * rng.uniform(-1.0, 1.0);
      for (NodeIndex v = 0; v < grid.node_count(); ++v) {
        double phase = 0.0;
        for (int a = 0; a < n; ++a)
          phase += 2.0 * std::numbers::pi * k[static_cast<std::size_t>(a)] * grid.coordinate(v, a) / grid.extent(a);
        out(v, c) += ca * std::cos(phase) + sa * std::sin(phase);
      }
    }
  }
  return out;
}

AlgebraField random_algebra_field(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec) {
  AlgebraField f(bundle);
  f.values() = random_fourier_field(bundle->base(), bundle->algebra_dim(), rng, spec);
  return f;
}

ConnectionForm random_connection(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec) {
  ConnectionForm a(bundle);
  a.values() = random_fourier_field(bundle->base(), bundle->algebra_dim() * bundle->base_dim(), rng, spec);
  return a;
}

AlgebraOneForm random_one_form(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec) {
  AlgebraOneForm p(bundle);
  p.values() = random_fourier_field(bundle->base(), bundle->algebra_dim() * bundle->base_dim(), rng, spec);
  return p;
}

CoalgebraVectorField random_coalgebra_vector_field(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec) {
  CoalgebraVectorField mu(bundle);
  mu.values() = random_fourier_field(bundle->base(), bundle->algebra_dim() * bundle->base_dim(), rng, spec);
  return mu;
}

GroupField random_group_field(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec) {
  const AlgebraField xi = random_algebra_field(bundle, rng, spec);
  GroupField s(bundle);
  for (NodeIndex v = 0; v < s.node_count(); ++v) s[v] = bundle->group().exp(xi.at(v));
  return s;
}

ScalarField random_bump(const MetricGrid& grid, SeededRng& rng, double radius_fraction) {
  const int n = grid.dims();
  if (!(radius_fraction > 0.0 && radius_fraction < 0.5))
    throw ContractViolation("random_bump: radius fraction must lie in (0, 0.5)");
  std::array<double, kMaxBaseDim> centre{}, radius{};
  for (int a = 0; a < n; ++a) {
    const double len = grid.extent(a);
    const double r = radius_fraction * len;
    radius[static_cast<std::size_t>(a)] = r;
    if (grid.boundary() == Boundary::Periodic) {
      centre[static_cast<std::size_t>(a)] = rng.uniform(0.0, len);
    } else {
      const double margin = r + grid.spacing(a);
      if (margin >= len - margin) throw ContractViolation("random_bump: grid too coarse for the requested radius");
      centre[static_cast<std::size_t>(a)] = rng.uniform(margin, len - margin);
    }
  }
  ScalarField bump(grid.node_count(), 1);
  for (NodeIndex v = 0; v < grid.node_count(); ++v) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      double d = std::abs(grid.coordinate(v, a) - centre[static_cast<std::size_t>(a)]);
      if (grid.boundary() == Boundary::Periodic) d = std::min(d, grid.extent(a) - d);
      d /= radius[static_cast<std::size_t>(a)];
      r2 += d * d;
    }
    bump(v, 0) = r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
  }
  return bump;
}

AlgebraField random_compact_algebra_field(const BundlePtr& bundle, SeededRng& rng, const FourierSpec& spec,
                                          double radius_fraction) {
  AlgebraField f = random_algebra_field(bundle, rng, spec);
  const ScalarField bump = random_bump(bundle->base(), rng, radius_fraction);
  for (NodeIndex v = 0; v < f.node_count(); ++v)
    for (double& x : f.values().at(v)) x *= bump(v, 0);
  return f;
}

}  // namespace covep
