#include "covep/manifold.hpp"

#include "covep/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace covep {

namespace {

std::string describe(const MultiIndex& idx, int dims) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < dims; ++a) os << (a ? "," : "") << idx[static_cast<std::size_t>(a)];
  os << ")";
  return os.str();
}

void validate(const GridConfig& c) {
  if (c.dims < 1 || c.dims > kMaxBaseDim) throw ConstructionError("grid: dims must be 1, 2 or 3");
  if (static_cast<int>(c.shape.size()) != c.dims || static_cast<int>(c.extent.size()) != c.dims)
    throw ConstructionError("grid: shape and extent must have `dims` entries");
  for (int a = 0; a < c.dims; ++a) {
    if (c.shape[static_cast<std::size_t>(a)] < 3) throw ConstructionError("grid: every axis needs at least 3 nodes");
    double len = c.extent[static_cast<std::size_t>(a)];
    if (!(len > 0.0) || !std::isfinite(len)) throw ConstructionError("grid: extents must be positive");
  }
}

}  // namespace

double NodeField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool NodeField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

NodeField& NodeField::operator+=(const NodeField& o) {
  if (o.nodes_ != nodes_ || o.components_ != components_) throw ContractViolation("NodeField: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

NodeField& NodeField::operator-=(const NodeField& o) {
  if (o.nodes_ != nodes_ || o.components_ != components_) throw ContractViolation("NodeField: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

NodeField& NodeField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

MultiIndex MetricGrid::multi_index(NodeIndex node) const {
  MultiIndex idx{0, 0, 0};
  for (int a = 0; a < dims_; ++a) idx[static_cast<std::size_t>(a)] = axis_index(node, a);
  return idx;
}

NodeIndex MetricGrid::linear_index(const MultiIndex& idx) const {
  NodeIndex node = 0;
  for (int a = 0; a < dims_; ++a) {
    int i = idx[static_cast<std::size_t>(a)];
    if (i < 0 || i >= shape(a)) throw ContractViolation("grid: multi-index out of range");
    node += static_cast<NodeIndex>(i) * stride(a);
  }
  return node;
}

NodeIndex MetricGrid::neighbor(NodeIndex node, int axis, int offset) const {
  const int n = shape(axis);
  const int i = axis_index(node, axis);
  int j = i + offset;
  if (boundary_ == Boundary::Periodic) {
    j %= n;
    if (j < 0) j += n;
  } else if (j < 0 || j >= n) {
    throw ContractViolation("grid: neighbor outside a Dirichlet box");
  }
  return node + static_cast<NodeIndex>(j) * stride(axis) - static_cast<NodeIndex>(i) * stride(axis);
}

double MetricGrid::cell_volume() const {
  double v = 1.0;
  for (double h : spacing_) v *= h;
  return v;
}

MetricGrid build_grid(const GridConfig& config, ChristoffelSource source) {
  validate(config);
  MetricGrid grid;
  grid.config_ = config;
  grid.dims_ = config.dims;
  grid.shape_ = config.shape;
  grid.extent_ = config.extent;
  grid.boundary_ = config.boundary;
  const int n = config.dims;

  grid.stride_.assign(static_cast<std::size_t>(n), 1);
  for (int a = n - 2; a >= 0; --a)
    grid.stride_[static_cast<std::size_t>(a)] =
        grid.stride_[static_cast<std::size_t>(a + 1)] * static_cast<std::size_t>(config.shape[static_cast<std::size_t>(a + 1)]);
  grid.node_count_ = grid.stride_[0] * static_cast<std::size_t>(config.shape[0]);
  for (int a = 0; a < n; ++a) {
    const double len = config.extent[static_cast<std::size_t>(a)];
    const int cnt = config.shape[static_cast<std::size_t>(a)];
    grid.spacing_.push_back(config.boundary == Boundary::Periodic ? len / cnt : len / (cnt - 1));
  }

  const std::size_t nodes = grid.node_count_;
  if (config.boundary == Boundary::Dirichlet) {
    grid.boundary_mask_.assign(nodes, 0);
    for (NodeIndex v = 0; v < nodes; ++v)
      for (int a = 0; a < n; ++a) {
        int i = grid.axis_index(v, a);
        if (i == 0 || i == grid.shape(a) - 1) grid.boundary_mask_[v] = 1;
      }
  }

  // Metric values.
  const auto nn = static_cast<std::size_t>(n * n);
  grid.g_.assign(nodes * nn, 0.0);
  const std::string& family = config.metric.family;
  bool analytic = true;
  if (family == "flat") {
    for (NodeIndex v = 0; v < nodes; ++v)
      for (int i = 0; i < n; ++i) grid.g_[grid.tensor2(v, i, i)] = 1.0;
  } else if (family == "diag_periodic") {
    const double a = config.metric.a;
    const double b = config.metric.b;
    if (b != 0.0 && n < 2) throw ConstructionError("metric diag_periodic: b != 0 needs dims >= 2");
    for (NodeIndex v = 0; v < nodes; ++v) {
      for (int i = 0; i < n; ++i) grid.g_[grid.tensor2(v, i, i)] = 1.0;
      double g11 = a;
      if (n >= 2) g11 += b * std::sin(2.0 * std::numbers::pi * grid.coordinate(v, 1) / grid.extent(1));
      grid.g_[grid.tensor2(v, 0, 0)] = g11;
    }
  } else if (family == "table") {
    analytic = false;
    if (config.metric.table.size() != nodes * nn)
      throw ConstructionError("metric table: expected " + std::to_string(nodes * nn) + " values");
    grid.g_ = config.metric.table;
  } else {
    throw ConstructionError("metric: unknown family '" + family + "'");
  }

  grid.g_inv_.assign(nodes * nn, 0.0);
  grid.sqrt_det_g_.assign(nodes, 0.0);
  for (NodeIndex v = 0; v < nodes; ++v) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = grid.g_[grid.tensor2(v, i, j)];
    const auto block = g.topLeftCorner(n, n);
    bool ok = block.allFinite() && (block - block.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
    Eigen::LLT<Eigen::MatrixXd> llt(block);
    if (!ok || llt.info() != Eigen::Success)
      throw ConstructionError("metric not symmetric positive-definite at node " + describe(grid.multi_index(v), n));
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    if ((Eigen::MatrixXd(block) * inv - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
      throw ConstructionError("metric too ill-conditioned at node " + describe(grid.multi_index(v), n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) grid.g_inv_[grid.tensor2(v, i, j)] = inv(i, j);
    double det = 1.0;
    for (int i = 0; i < n; ++i) det *= llt.matrixL()(i, i);
    grid.sqrt_det_g_[v] = det;
  }
  if (family == "flat")
    std::fill(grid.sqrt_det_g_.begin(), grid.sqrt_det_g_.end(), 1.0);

  // Christoffel symbols Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij).
  const auto nnn = static_cast<std::size_t>(n) * nn;
  grid.christoffel_.assign(nodes * nnn, 0.0);
  auto gamma = [&](NodeIndex v, int k, int i, int j) -> double& {
    return grid.christoffel_[(v * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)) * nn +
                             static_cast<std::size_t>(i * n + j)];
  };
  const bool use_fd = !analytic || source == ChristoffelSource::FiniteDifference;
  grid.christoffel_fd_ = use_fd && family != "flat";
  if (family == "flat") {
    // zero
  } else if (!use_fd) {
    // diag_periodic: only g_11 = f(x^2) varies.
    if (n >= 2 && config.metric.b != 0.0) {
      const double k2 = 2.0 * std::numbers::pi / grid.extent(1);
      for (NodeIndex v = 0; v < nodes; ++v) {
        const double f = grid.metric(v, 0, 0);
        const double df = config.metric.b * k2 * std::cos(k2 * grid.coordinate(v, 1));
        gamma(v, 0, 0, 1) = gamma(v, 0, 1, 0) = df / (2.0 * f);
        gamma(v, 1, 0, 0) = -0.5 * df;
      }
    }
  } else {
    NodeField gf(nodes, static_cast<int>(nn));
    for (NodeIndex v = 0; v < nodes; ++v)
      for (std::size_t c = 0; c < nn; ++c) gf(v, static_cast<int>(c)) = grid.g_[v * nn + c];
    std::vector<NodeField> dg;
    for (int l = 0; l < n; ++l) dg.push_back(partial_derivative(grid, gf, l));
    auto d = [&](int l, NodeIndex v, int i, int j) { return dg[static_cast<std::size_t>(l)](v, i * n + j); };
    for (NodeIndex v = 0; v < nodes; ++v)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < n; ++l)
              s += grid.metric_inverse(v, k, l) * (d(i, v, l, j) + d(j, v, l, i) - d(l, v, i, j));
            gamma(v, k, i, j) = 0.5 * s;
          }
  }

  grid.weight_.assign(nodes, 0.0);
  const double cell = grid.cell_volume();
  for (NodeIndex v = 0; v < nodes; ++v) {
    double w = cell * grid.sqrt_det_g_[v];
    if (config.boundary == Boundary::Dirichlet)
      for (int a = 0; a < n; ++a) {
        int i = grid.axis_index(v, a);
        if (i == 0 || i == grid.shape(a) - 1) w *= 0.5;
      }
    grid.weight_[v] = w;
  }
  return grid;
}

NodeField partial_derivative(const MetricGrid& grid, const NodeField& f, int axis) {
  if (axis < 0 || axis >= grid.dims()) throw ContractViolation("partial_derivative: axis out of range");
  if (f.nodes() != grid.node_count()) throw ContractViolation("partial_derivative: field does not match grid");
  const int comps = f.components();
  const int n = grid.shape(axis);
  const double inv2h = 1.0 / (2.0 * grid.spacing(axis));
  const auto stride = grid.stride(axis);
  const bool periodic = grid.boundary() == Boundary::Periodic;
  NodeField out(f.nodes(), comps);
  for (NodeIndex v = 0; v < grid.node_count(); ++v) {
    const int i = grid.axis_index(v, axis);
    auto dst = out.at(v);
    if (i > 0 && i < n - 1) {
      auto fp = f.at(v + stride);
      auto fm = f.at(v - stride);
      for (int c = 0; c < comps; ++c) dst[static_cast<std::size_t>(c)] = (fp[static_cast<std::size_t>(c)] - fm[static_cast<std::size_t>(c)]) * inv2h;
    } else if (periodic) {
      auto fp = f.at(grid.neighbor(v, axis, 1));
      auto fm = f.at(grid.neighbor(v, axis, -1));
      for (int c = 0; c < comps; ++c) dst[static_cast<std::size_t>(c)] = (fp[static_cast<std::size_t>(c)] - fm[static_cast<std::size_t>(c)]) * inv2h;
    } else if (i == 0) {
      auto f0 = f.at(v);
      auto f1 = f.at(v + stride);
      auto f2 = f.at(v + 2 * stride);
      for (std::size_t c = 0; c < static_cast<std::size_t>(comps); ++c)
        dst[c] = (-3.0 * f0[c] + 4.0 * f1[c] - f2[c]) * inv2h;
    } else {
      auto f0 = f.at(v);
      auto f1 = f.at(v - stride);
      auto f2 = f.at(v - 2 * stride);
      for (std::size_t c = 0; c < static_cast<std::size_t>(comps); ++c)
        dst[c] = (3.0 * f0[c] - 4.0 * f1[c] + f2[c]) * inv2h;
    }
  }
  return out;
}

ScalarField riemannian_divergence(const MetricGrid& grid, const VectorField& x) {
  const int n = grid.dims();
  if (x.nodes() != grid.node_count() || x.components() != n)
    throw ContractViolation("riemannian_divergence: field does not match grid");
  ScalarField out(grid.node_count(), 1);
  for (int i = 0; i < n; ++i) {
    ScalarField weighted(grid.node_count(), 1);
    for (NodeIndex v = 0; v < grid.node_count(); ++v) weighted(v, 0) = grid.sqrt_det(v) * x(v, i);
    out += partial_derivative(grid, weighted, i);
  }
  for (NodeIndex v = 0; v < grid.node_count(); ++v) out(v, 0) /= grid.sqrt_det(v);
  return out;
}

ScalarField divergence_christoffel_form(const MetricGrid& grid, const VectorField& x) {
  const int n = grid.dims();
  if (x.nodes() != grid.node_count() || x.components() != n)
    throw ContractViolation("divergence_christoffel_form: field does not match grid");
  ScalarField out(grid.node_count(), 1);
  for (int i = 0; i < n; ++i) {
    NodeField dx = partial_derivative(grid, x, i);
    for (NodeIndex v = 0; v < grid.node_count(); ++v) out(v, 0) += dx(v, i);
  }
  for (NodeIndex v = 0; v < grid.node_count(); ++v)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) out(v, 0) += grid.christoffel(v, i, i, k) * x(v, k);
  return out;
}

double integrate(const MetricGrid& grid, const ScalarField& f) {
  if (f.nodes() != grid.node_count() || f.components() != 1)
    throw ContractViolation("integrate: expected a scalar field on this grid");
  double s = 0.0;
  for (NodeIndex v = 0; v < grid.node_count(); ++v) s += f(v, 0) * grid.quadrature_weight(v);
  return s;
}

}  // namespace covep
