#include "covep/reduction.hpp"

#include "covep/errors.hpp"

#include <cmath>

namespace covep {

OneFormValue one_form_value(const AlgebraOneForm& sigma, NodeIndex v) {
  const int m = sigma.algebra_dim();
  const int n = sigma.base_dim();
  OneFormValue p(m, n);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) p(a, i) = sigma(v, a, i);
  return p;
}

namespace {

Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxBaseDim, kMaxBaseDim> inverse_metric(
    const MetricGrid& grid, NodeIndex v) {
  const int n = grid.dims();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxBaseDim, kMaxBaseDim> ginv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ginv(i, j) = grid.metric_inverse(v, i, j);
  return ginv;
}

}  // namespace

ReducedLagrangian ReducedLagrangian::harmonic() { return ReducedLagrangian(Kind::Harmonic, "harmonic"); }

ReducedLagrangian ReducedLagrangian::custom(std::string name, Density density,
                                            std::optional<FiberDerivative> derivative) {
  if (!density) throw ContractViolation("custom Lagrangian needs a density");
  ReducedLagrangian l(Kind::Custom, std::move(name));
  l.density_ = std::move(density);
  l.derivative_ = std::move(derivative);
  return l;
}

double ReducedLagrangian::density(const TrivialBundle& bundle, NodeIndex v, const OneFormValue& p) const {
  if (kind_ == Kind::Custom) return density_(bundle, v, p);
  const auto ginv = inverse_metric(bundle.base(), v);
  const AlgebraMatrix& h = bundle.group().metric();
  // 1/2 tr(g^{-1} p^T h p)
  return 0.5 * (ginv * p.transpose() * h * p).trace();
}

CoOneFormValue ReducedLagrangian::fiber_derivative(const TrivialBundle& bundle, NodeIndex v,
                                                   const OneFormValue& p) const {
  if (kind_ == Kind::Harmonic) {
    const auto ginv = inverse_metric(bundle.base(), v);
    // mu^{j b} = g^{ij} p^a_i h_ab
    return CoOneFormValue(ginv * p.transpose() * bundle.group().metric());
  }
  if (derivative_) return (*derivative_)(bundle, v, p);
  const int m = static_cast<int>(p.rows());
  const int n = static_cast<int>(p.cols());
  CoOneFormValue mu(n, m);
  OneFormValue q = p;
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      const double x = p(a, i);
      q(a, i) = x + kFiberStep;
      const double up = density_(bundle, v, q);
      q(a, i) = x - kFiberStep;
      const double dn = density_(bundle, v, q);
      q(a, i) = x;
      mu(i, a) = (up - dn) / (2.0 * kFiberStep);
    }
  return mu;
}

double reduced_energy(const ReducedLagrangian& l, const AlgebraOneForm& sigma) {
  const auto& bundle = *sigma.bundle();
  const auto& grid = bundle.base();
  double e = 0.0;
  for (NodeIndex v = 0; v < sigma.node_count(); ++v)
    e += l.density(bundle, v, one_form_value(sigma, v)) * grid.quadrature_weight(v);
  return e;
}

CoalgebraVectorField fiber_derivative(const ReducedLagrangian& l, const AlgebraOneForm& sigma) {
  const auto& bundle = *sigma.bundle();
  const int n = sigma.base_dim();
  const int m = sigma.algebra_dim();
  CoalgebraVectorField mu(sigma.bundle());
  for (NodeIndex v = 0; v < sigma.node_count(); ++v) {
    const CoOneFormValue d = l.fiber_derivative(bundle, v, one_form_value(sigma, v));
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < m; ++b) mu(v, i, b) = d(i, b);
  }
  return mu;
}

CoalgebraField covariant_divergence(const CoalgebraVectorField& mu, const ConnectionForm& a) {
  require_compatible(*mu.bundle(), *a.bundle(), "covariant_divergence");
  const auto& grid = mu.grid();
  const auto& g = mu.group();
  const int n = grid.dims();
  const int m = g.dim();
  CoalgebraField out(mu.bundle());

  NodeField weighted = mu.values();
  for (NodeIndex v = 0; v < mu.node_count(); ++v)
    for (double& x : weighted.at(v)) x *= grid.sqrt_det(v);
  for (int i = 0; i < n; ++i) {
    NodeField d = partial_derivative(grid, weighted, i);
    for (NodeIndex v = 0; v < mu.node_count(); ++v)
      for (int b = 0; b < m; ++b) out(v, b) += d(v, i * m + b);
  }
  for (NodeIndex v = 0; v < mu.node_count(); ++v) {
    CoalgebraVector r = (1.0 / grid.sqrt_det(v)) * out.at(v);
    for (int i = 0; i < n; ++i) r -= g.coad(a.component(v, i), mu.component(v, i));
    out.set(v, r);
  }
  return out;
}

CoalgebraField coadjoint_term(const AlgebraOneForm& sigma, const CoalgebraVectorField& mu, const ConnectionForm& a) {
  require_compatible(*sigma.bundle(), *mu.bundle(), "coadjoint_term");
  require_compatible(*sigma.bundle(), *a.bundle(), "coadjoint_term");
  const auto& g = sigma.group();
  CoalgebraField out(sigma.bundle());
  for (NodeIndex v = 0; v < sigma.node_count(); ++v) {
    CoalgebraVector r(g.dim());
    for (int i = 0; i < sigma.base_dim(); ++i)
      r += g.coad(sigma.component(v, i) + a.component(v, i), mu.component(v, i));
    out.set(v, r);
  }
  return out;
}

CoalgebraField ep_residual(const ReducedLagrangian& l, const AlgebraOneForm& sigma, const ConnectionForm& a) {
  const CoalgebraVectorField mu = fiber_derivative(l, sigma);
  CoalgebraField r = covariant_divergence(mu, a);
  r += coadjoint_term(sigma, mu, a);
  return r;
}

double pairing_integral(const CoalgebraField& nu, const AlgebraField& eta) {
  require_compatible(*nu.bundle(), *eta.bundle(), "pairing_integral");
  const auto& grid = nu.grid();
  double s = 0.0;
  for (NodeIndex v = 0; v < nu.node_count(); ++v) s += pairing(nu.at(v), eta.at(v)) * grid.quadrature_weight(v);
  return s;
}

GroupField flow_section(const GroupField& s, const AlgebraField& eta, double eps) {
  require_compatible(*s.bundle(), *eta.bundle(), "flow_section");
  const auto& g = s.group();
  GroupField out(s.bundle());
  for (NodeIndex v = 0; v < s.node_count(); ++v) out[v] = g.multiply(g.exp(eps * eta.at(v)), s[v]);
  return out;
}

double energy_gradient_oracle(const ReducedLagrangian& l, const GroupField& s, const AlgebraField& eta, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw ContractViolation("energy_gradient_oracle: eps must lie in [1e-7, 1e-3]");
  const auto& grid = s.grid();
  if (grid.boundary() == Boundary::Dirichlet)
    for (NodeIndex v = 0; v < eta.node_count(); ++v)
      if (grid.on_boundary(v) && eta.at(v).max_abs() != 0.0)
        throw ContractViolation("energy_gradient_oracle: variation must vanish on the Dirichlet boundary");
  const double up = reduced_energy(l, reduce_jet(flow_section(s, eta, eps)));
  const double dn = reduced_energy(l, reduce_jet(flow_section(s, eta, -eps)));
  const double d = (up - dn) / (2.0 * eps);
  if (!std::isfinite(d)) throw NumericalError("energy_gradient_oracle: non-finite energy");
  return d;
}

}  // namespace covep
