#pragma once

// Reduced Lagrangians on the bundle of connections, their fiber derivative,
// the covariant divergence, the Euler-Poincare residual and an independent
// Euler-Lagrange check through the unreduced energy.

#include "covep/sections.hpp"

#include <functional>
#include <optional>
#include <string>

namespace covep {

/// Value of sigma at one node: p^a_i as an m x n matrix.
using OneFormValue = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAlgebraDim, kMaxBaseDim>;
/// Value of dl/dsigma at one node: mu^{i b} as an n x m matrix.
using CoOneFormValue = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxBaseDim, kMaxAlgebraDim>;

OneFormValue one_form_value(const AlgebraOneForm& sigma, NodeIndex v);

/// Pointwise reduced Lagrangian l(x, sigma_x).
class ReducedLagrangian {
 public:
  enum class Kind { Harmonic, Custom };

  using Density = std::function<double(const TrivialBundle&, NodeIndex, const OneFormValue&)>;
  using FiberDerivative = std::function<CoOneFormValue(const TrivialBundle&, NodeIndex, const OneFormValue&)>;

  /// l = 1/2 g^{ij} p^a_i p^b_j h_ab with g from the base grid and h from
  /// the group model.
  static ReducedLagrangian harmonic();

  /// Arbitrary pointwise density. Without `derivative` the fiber derivative
  /// is taken by central differences with step 1e-6.
  static ReducedLagrangian custom(std::string name, Density density,
                                  std::optional<FiberDerivative> derivative = std::nullopt);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool has_analytic_derivative() const { return kind_ == Kind::Harmonic || derivative_.has_value(); }

  double density(const TrivialBundle& bundle, NodeIndex v, const OneFormValue& p) const;
  CoOneFormValue fiber_derivative(const TrivialBundle& bundle, NodeIndex v, const OneFormValue& p) const;

 private:
  ReducedLagrangian(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  Density density_;
  std::optional<FiberDerivative> derivative_;
};

inline constexpr double kFiberStep = 1e-6;

/// integral of l(sigma) with the Riemannian volume.
double reduced_energy(const ReducedLagrangian& l, const AlgebraOneForm& sigma);

/// dl/dsigma as a section of TM (x) (adP)*.
CoalgebraVectorField fiber_derivative(const ReducedLagrangian& l, const AlgebraOneForm& sigma);

/// (div^H mu)_b = div(mu^{. b}) - sum_i ad*_{A_i}(mu^{i .})_b.
CoalgebraField covariant_divergence(const CoalgebraVectorField& mu, const ConnectionForm& a);

/// sum_i ad*_{sigma^H_i} mu^{i .}
CoalgebraField coadjoint_term(const AlgebraOneForm& sigma, const CoalgebraVectorField& mu, const ConnectionForm& a);

/// R = div^H(dl/dsigma) + ad*_{sigma^H}(dl/dsigma); zero exactly on
/// solutions of the Euler-Poincare equations.
CoalgebraField ep_residual(const ReducedLagrangian& l, const AlgebraOneForm& sigma, const ConnectionForm& a);

/// integral of <nu, eta> with the Riemannian volume.
double pairing_integral(const CoalgebraField& nu, const AlgebraField& eta);

/// d/de|0 of the unreduced energy along s_e = exp(e xi) s by symmetric
/// differences. eps must lie in [1e-7, 1e-3]; on Dirichlet grids eta must
/// vanish on the boundary.
double energy_gradient_oracle(const ReducedLagrangian& l, const GroupField& s, const AlgebraField& eta, double eps);

/// s_e(x) = exp(e xi(x)) s(x).
GroupField flow_section(const GroupField& s, const AlgebraField& eta, double eps);

}  // namespace covep
