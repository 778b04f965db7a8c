#pragma once

#include "covep/random_fields.hpp"
#include "covep/sections.hpp"

#include <vector>

namespace covep::test {

inline GridConfig grid_config(std::vector<int> shape, Boundary boundary, std::vector<double> extent = {}) {
  GridConfig c;
  c.dims = static_cast<int>(shape.size());
  c.shape = std::move(shape);
  c.extent = extent.empty() ? std::vector<double>(c.shape.size(), 1.0) : std::move(extent);
  c.boundary = boundary;
  return c;
}

inline BundlePtr torus(const GroupModel& g, std::vector<int> shape) {
  return make_bundle(build_grid(grid_config(std::move(shape), Boundary::Periodic)), g);
}

inline BundlePtr box(const GroupModel& g, std::vector<int> shape) {
  return make_bundle(build_grid(grid_config(std::move(shape), Boundary::Dirichlet)), g);
}

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace covep::test
