#pragma once

// Discretized base manifold (M, g): a regular lattice on a box or torus with
// a metric tensor field, its Christoffel symbols, second-order finite
// differences, the Riemannian divergence and quadrature.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace covep {

enum class Boundary { Periodic, Dirichlet };

using NodeIndex = std::size_t;
using MultiIndex = std::array<int, 3>;

inline constexpr int kMaxBaseDim = 3;

/// Metric selected by a named analytic family.
///   "flat":          g = identity
///   "diag_periodic": g = diag(a + b sin(2 pi x^2 / L_2), 1, 1)
///   "table":         per-node row-major n x n matrices in `table`
struct MetricSpec {
  std::string family = "flat";
  double a = 1.0;
  double b = 0.0;
  std::vector<double> table;
};

struct GridConfig {
  int dims = 1;
  std::vector<int> shape;
  std::vector<double> extent;
  Boundary boundary = Boundary::Periodic;
  MetricSpec metric;
};

enum class ChristoffelSource { Auto, FiniteDifference };

/// Per-node block of `components` doubles, stored node-major.
class NodeField {
 public:
  NodeField() = default;
  NodeField(std::size_t nodes, int components, double fill = 0.0)
      : nodes_(nodes), components_(components), data_(nodes * static_cast<std::size_t>(components), fill) {}

  std::size_t nodes() const { return nodes_; }
  int components() const { return components_; }

  double& operator()(NodeIndex node, int comp) { return data_[node * static_cast<std::size_t>(components_) + comp]; }
  double operator()(NodeIndex node, int comp) const {
    return data_[node * static_cast<std::size_t>(components_) + comp];
  }
  std::span<double> at(NodeIndex node) {
    return {data_.data() + node * static_cast<std::size_t>(components_), static_cast<std::size_t>(components_)};
  }
  std::span<const double> at(NodeIndex node) const {
    return {data_.data() + node * static_cast<std::size_t>(components_), static_cast<std::size_t>(components_)};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double max_abs() const;
  bool all_finite() const;

  NodeField& operator+=(const NodeField& o);
  NodeField& operator-=(const NodeField& o);
  NodeField& operator*=(double s);

 private:
  std::size_t nodes_ = 0;
  int components_ = 0;
  std::vector<double> data_;
};

inline NodeField operator+(NodeField a, const NodeField& b) { return a += b; }
inline NodeField operator-(NodeField a, const NodeField& b) { return a -= b; }
inline NodeField operator*(double s, NodeField a) { return a *= s; }

using ScalarField = NodeField;    // 1 component
using VectorField = NodeField;    // X^i, n components
using CovectorField = NodeField;  // w_i, n components

class MetricGrid {
 public:
  int dims() const { return dims_; }
  int shape(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
  double extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  Boundary boundary() const { return boundary_; }
  std::size_t node_count() const { return node_count_; }
  const GridConfig& config() const { return config_; }

  MultiIndex multi_index(NodeIndex node) const;
  NodeIndex linear_index(const MultiIndex& idx) const;
  int axis_index(NodeIndex node, int axis) const {
    return static_cast<int>((node / stride_[static_cast<std::size_t>(axis)]) %
                            static_cast<std::size_t>(shape_[static_cast<std::size_t>(axis)]));
  }
  std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }
  double coordinate(NodeIndex node, int axis) const { return axis_index(node, axis) * spacing(axis); }

  /// Neighbor `offset` steps along `axis`; wraps on periodic grids. On
  /// Dirichlet grids the target must lie inside the box.
  NodeIndex neighbor(NodeIndex node, int axis, int offset) const;

  /// True for nodes on the box boundary of a Dirichlet grid.
  bool on_boundary(NodeIndex node) const { return boundary_mask_.empty() ? false : boundary_mask_[node] != 0; }

  double metric(NodeIndex node, int i, int j) const { return g_[tensor2(node, i, j)]; }
  double metric_inverse(NodeIndex node, int i, int j) const { return g_inv_[tensor2(node, i, j)]; }
  double sqrt_det(NodeIndex node) const { return sqrt_det_g_[node]; }
  /// Gamma^k_{ij}.
  double christoffel(NodeIndex node, int k, int i, int j) const {
    return christoffel_[(node * static_cast<std::size_t>(dims_) + static_cast<std::size_t>(k)) *
                            static_cast<std::size_t>(dims_ * dims_) +
                        static_cast<std::size_t>(i * dims_ + j)];
  }
  bool christoffel_from_finite_differences() const { return christoffel_fd_; }

  /// Product of the lattice spacings.
  double cell_volume() const;
  /// Quadrature weight of a node including sqrt(det g) and trapezoid factors
  /// on Dirichlet boundaries.
  double quadrature_weight(NodeIndex node) const { return weight_[node]; }

  friend MetricGrid build_grid(const GridConfig& config, ChristoffelSource source);

 private:
  std::size_t tensor2(NodeIndex node, int i, int j) const {
    return node * static_cast<std::size_t>(dims_ * dims_) + static_cast<std::size_t>(i * dims_ + j);
  }

  GridConfig config_;
  int dims_ = 0;
  std::vector<int> shape_;
  std::vector<double> extent_;
  std::vector<double> spacing_;
  std::vector<std::size_t> stride_;
  Boundary boundary_ = Boundary::Periodic;
  std::size_t node_count_ = 0;
  std::vector<unsigned char> boundary_mask_;
  std::vector<double> g_;
  std::vector<double> g_inv_;
  std::vector<double> sqrt_det_g_;
  std::vector<double> christoffel_;
  std::vector<double> weight_;
  bool christoffel_fd_ = false;
};

/// Validates the configuration and evaluates the metric family. Throws
/// ConstructionError (naming the node) if g is not positive-definite.
MetricGrid build_grid(const GridConfig& config, ChristoffelSource source = ChristoffelSource::Auto);

/// Second-order central difference along `axis`, applied to every component.
/// Periodic grids wrap; Dirichlet grids use one-sided second-order stencils on
/// the two boundary layers.
NodeField partial_derivative(const MetricGrid& grid, const NodeField& f, int axis);

/// div X = (1/sqrt g) d_i (sqrt g X^i).
ScalarField riemannian_divergence(const MetricGrid& grid, const VectorField& x);

/// div X = d_i X^i + Gamma^i_{ik} X^k; agrees with riemannian_divergence up
/// to truncation error.
ScalarField divergence_christoffel_form(const MetricGrid& grid, const VectorField& x);

/// sum_nodes f * quadrature_weight.
double integrate(const MetricGrid& grid, const ScalarField& f);

}  // namespace covep
