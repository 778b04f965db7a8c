#include "covep/sections.hpp"

#include "covep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace covep {

namespace {

std::string node_name(const MetricGrid& grid, NodeIndex v) {
  auto idx = grid.multi_index(v);
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < grid.dims(); ++a) os << (a ? "," : "") << idx[static_cast<std::size_t>(a)];
  os << ")";
  return os.str();
}

AlgebraVector log_difference(const GroupModel& g, const GroupElement& to, const GroupElement& from_inv,
                             const MetricGrid& grid, NodeIndex v, int axis) {
  try {
    return g.log(g.multiply(to, from_inv));
  } catch (const DomainError& e) {
    throw DomainError("reduce_jet: node " + node_name(grid, v) + " axis " + std::to_string(axis) + ": " + e.what());
  }
}

}  // namespace

void require_compatible(const TrivialBundle& a, const TrivialBundle& b, const char* what) {
  if (&a == &b) return;
  bool ok = a.base_dim() == b.base_dim() && a.algebra_dim() == b.algebra_dim() &&
            a.group().kind() == b.group().kind() && a.node_count() == b.node_count();
  for (int k = 0; ok && k < a.base_dim(); ++k) ok = a.base().shape(k) == b.base().shape(k);
  if (!ok) throw ContractViolation(std::string(what) + ": fields live on different bundles");
}

GroupField::GroupField(BundlePtr bundle) : GroupField(bundle, bundle->group().identity()) {}

GroupField::GroupField(BundlePtr bundle, const GroupElement& fill)
    : bundle_(std::move(bundle)), values_(bundle_->node_count(), fill) {
  if (!bundle_->group().is_valid(fill, 1e-10)) throw ContractViolation("GroupField: fill value is not a group element");
}

CurvatureField::CurvatureField(BundlePtr bundle)
    : BundleField(bundle, bundle->algebra_dim() * std::max(1, pair_count(bundle->base_dim()))) {}

int CurvatureField::pair_index(int i, int j) const {
  // i < j; row-major over the strict upper triangle.
  const int n = base_dim();
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

double CurvatureField::operator()(NodeIndex v, int gamma, int i, int j) const {
  if (i == j) return 0.0;
  const int stride = std::max(1, pair_count(base_dim()));
  if (i < j) return values_(v, gamma * stride + pair_index(i, j));
  return -values_(v, gamma * stride + pair_index(j, i));
}

void CurvatureField::set(NodeIndex v, int gamma, int i, int j, double value) {
  if (i >= j) throw ContractViolation("CurvatureField::set expects i < j");
  const int stride = std::max(1, pair_count(base_dim()));
  values_(v, gamma * stride + pair_index(i, j)) = value;
}

double CurvatureField::max_abs(bool interior_only) const {
  if (base_dim() < 2) return 0.0;
  double m = 0.0;
  for (NodeIndex v = 0; v < node_count(); ++v) {
    if (interior_only && grid().on_boundary(v)) continue;
    for (double x : values_.at(v)) m = std::max(m, std::abs(x));
  }
  return m;
}

AlgebraOneForm reduce_jet(const GroupField& s) {
  const auto& grid = s.grid();
  const auto& g = s.group();
  const int n = grid.dims();
  AlgebraOneForm sigma(s.bundle());
  std::vector<GroupElement> inv;
  inv.reserve(s.node_count());
  for (NodeIndex v = 0; v < s.node_count(); ++v) inv.push_back(g.inverse(s[v]));
  const bool periodic = grid.boundary() == Boundary::Periodic;
  for (NodeIndex v = 0; v < s.node_count(); ++v) {
    for (int i = 0; i < n; ++i) {
      const int k = grid.axis_index(v, i);
      const int last = grid.shape(i) - 1;
      const double h = grid.spacing(i);
      AlgebraVector p;
      if (periodic || (k > 0 && k < last)) {
        auto fwd = log_difference(g, s[grid.neighbor(v, i, 1)], inv[v], grid, v, i);
        auto bwd = log_difference(g, s[grid.neighbor(v, i, -1)], inv[v], grid, v, i);
        p = (1.0 / (2.0 * h)) * (fwd - bwd);
      } else if (k == 0) {
        p = (1.0 / h) * log_difference(g, s[grid.neighbor(v, i, 1)], inv[v], grid, v, i);
      } else {
        p = (-1.0 / h) * log_difference(g, s[grid.neighbor(v, i, -1)], inv[v], grid, v, i);
      }
      sigma.set_component(v, i, p);
    }
  }
  return sigma;
}

CurvatureField curvature(const AlgebraOneForm& sigma) {
  const auto& grid = sigma.grid();
  const auto& g = sigma.group();
  const int n = grid.dims();
  const int m = g.dim();
  CurvatureField f(sigma.bundle());
  if (n < 2) return f;
  std::vector<NodeField> dp;
  for (int j = 0; j < n; ++j) dp.push_back(partial_derivative(grid, sigma.values(), j));
  for (NodeIndex v = 0; v < sigma.node_count(); ++v)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        auto br = g.bracket(sigma.component(v, i), sigma.component(v, j));
        for (int c = 0; c < m; ++c) {
          double value = dp[static_cast<std::size_t>(j)](v, c * n + i) - dp[static_cast<std::size_t>(i)](v, c * n + j) + br[c];
          f.set(v, c, i, j, value);
        }
      }
  return f;
}

AlgebraOneForm covariant_derivative_ad(const AlgebraField& eta, const ConnectionForm& a) {
  require_compatible(*eta.bundle(), *a.bundle(), "covariant_derivative_ad");
  const auto& grid = eta.grid();
  const auto& g = eta.group();
  const int n = grid.dims();
  AlgebraOneForm out(eta.bundle());
  for (int i = 0; i < n; ++i) {
    NodeField dxi = partial_derivative(grid, eta.values(), i);
    for (NodeIndex v = 0; v < eta.node_count(); ++v) {
      AlgebraVector d(g.dim());
      for (int k = 0; k < g.dim(); ++k) d[k] = dxi(v, k);
      out.set_component(v, i, d + g.bracket(a.component(v, i), eta.at(v)));
    }
  }
  return out;
}

CoalgebraOneForm covariant_derivative_coad(const CoalgebraField& nu, const ConnectionForm& a) {
  require_compatible(*nu.bundle(), *a.bundle(), "covariant_derivative_coad");
  const auto& grid = nu.grid();
  const auto& g = nu.group();
  const int n = grid.dims();
  CoalgebraOneForm out(nu.bundle());
  for (int i = 0; i < n; ++i) {
    NodeField dpsi = partial_derivative(grid, nu.values(), i);
    for (NodeIndex v = 0; v < nu.node_count(); ++v) {
      CoalgebraVector d(g.dim());
      for (int k = 0; k < g.dim(); ++k) d[k] = dpsi(v, k);
      out.set_component(v, i, d - g.coad(a.component(v, i), nu.at(v)));
    }
  }
  return out;
}

AlgebraOneForm variation_delta_sigma(const AlgebraOneForm& sigma, const AlgebraField& eta, const ConnectionForm& a) {
  require_compatible(*sigma.bundle(), *eta.bundle(), "variation_delta_sigma");
  require_compatible(*sigma.bundle(), *a.bundle(), "variation_delta_sigma");
  const auto& g = sigma.group();
  AlgebraOneForm nabla = covariant_derivative_ad(eta, a);
  AlgebraOneForm out(sigma.bundle());
  for (NodeIndex v = 0; v < sigma.node_count(); ++v) {
    const AlgebraVector xi = eta.at(v);
    for (int i = 0; i < sigma.base_dim(); ++i) {
      const AlgebraVector sh = sigma.component(v, i) + a.component(v, i);
      out.set_component(v, i, nabla.component(v, i) - g.bracket(sh, xi));
    }
  }
  return out;
}

AlgebraOneForm sigma_h(const AlgebraOneForm& sigma, const ConnectionForm& a) {
  require_compatible(*sigma.bundle(), *a.bundle(), "sigma_h");
  AlgebraOneForm out = sigma;
  out.values() += a.values();
  return out;
}

ConnectionForm zero_connection(const BundlePtr& bundle) { return ConnectionForm(bundle); }

GroupField reconstruct_section(const AlgebraOneForm& sigma, const GroupElement& base_value, NodeIndex base_node,
                               double flatness_tol) {
  const auto& grid = sigma.grid();
  const auto& g = sigma.group();
  if (base_node >= grid.node_count()) throw ContractViolation("reconstruct_section: base node out of range");
  if (!g.is_valid(base_value, 1e-10)) throw ContractViolation("reconstruct_section: base value is not a group element");
  const double max_f = curvature(sigma).max_abs(grid.boundary() == Boundary::Dirichlet);
  if (!(max_f <= flatness_tol)) {
    std::ostringstream os;
    os << "reconstruct_section: input is not flat (max |F| = " << max_f << " > tolerance " << flatness_tol << ")";
    throw FlatnessError(os.str(), max_f);
  }

  const int n = grid.dims();
  const auto base = grid.multi_index(base_node);
  GroupField s(sigma.bundle());
  s[base_node] = base_value;

  // Axis k extends every node already reached (those agreeing with the base
  // on axes > k) along axis k, nearest first so the parent is always done.
  for (int k = 0; k < n; ++k) {
    const int b = base[static_cast<std::size_t>(k)];
    const double h = grid.spacing(k);
    for (int dist = 1; dist < grid.shape(k); ++dist) {
      for (int dir : {1, -1}) {
        const int target = b + dir * dist;
        if (target < 0 || target >= grid.shape(k)) continue;
        for (NodeIndex v = 0; v < grid.node_count(); ++v) {
          if (grid.axis_index(v, k) != target) continue;
          bool on_tree = true;
          for (int a = k + 1; a < n; ++a)
            if (grid.axis_index(v, a) != base[static_cast<std::size_t>(a)]) on_tree = false;
          if (!on_tree) continue;
          const NodeIndex parent = v + static_cast<NodeIndex>(b + dir * (dist - 1)) * grid.stride(k) -
                                   static_cast<NodeIndex>(target) * grid.stride(k);
          const AlgebraVector mid = 0.5 * (sigma.component(parent, k) + sigma.component(v, k));
          s[v] = g.multiply(g.exp((dir * h) * mid), s[parent]);
        }
      }
    }
  }
  return s;
}

}  // namespace covep
