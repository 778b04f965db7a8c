#pragma once

// Classical Euler-Poincare time stepping, gradient descent for harmonic maps
// into G driven by the reduced residual, and the batch equivalence check
// between the energy-gradient oracle and the residual pairing.

#include "covep/random_fields.hpp"
#include "covep/reduction.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace covep {

// ---------------------------------------------------------------------------
// Rigid body: mu' = -ad*_{sharp(mu)} mu, inertia = the group metric h.

struct RigidBodyState {
  double t = 0.0;
  CoalgebraVector mu;
};

/// One RK4 step. `body` carries the inertia as its algebra metric.
RigidBodyState classical_ep_step(const GroupModel& body, const RigidBodyState& state, double dt);

/// 1/2 <sharp(mu), mu>
double rigid_body_energy(const GroupModel& body, const CoalgebraVector& mu);

// ---------------------------------------------------------------------------
// Harmonic-map descent.

/// How the first trial step of each line search is chosen: the
/// Barzilai-Borwein quotient of the last two residuals, or twice the last
/// accepted step. Both are capped at initial_step.
enum class StepRule { BarzilaiBorwein, Doubling };

struct DescentOptions {
  int max_iter = 10000;
  double grad_tol = 1e-6;
  double initial_step = 1.0;
  double backtracking = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-14;
  StepRule step_rule = StepRule::BarzilaiBorwein;
};

enum class DescentStatus { Converged, MaxIterations, Stalled };

const char* to_string(DescentStatus status);

struct DescentState {
  int iteration = 0;
  GroupField field;
  double energy = 0.0;
  /// sqrt of the weighted sum of <R, sharp R> over the free nodes.
  double residual_norm = 0.0;
  double step = 0.0;
  DescentStatus status = DescentStatus::MaxIterations;

  bool converged() const { return status == DescentStatus::Converged; }
};

struct DescentTraceRow {
  int iteration;
  double energy;
  double residual_norm;
  double step;
};

/// Snapshot handed to the observer after every accepted iterate
/// (including the initial one).
struct DescentIterate {
  int iteration;
  const GroupField& field;
  const AlgebraOneForm& sigma;
  const CoalgebraField& residual;
  double energy;
  double residual_norm;
};

using DescentObserver = std::function<void(const DescentIterate&)>;

/// Minimizes the reduced energy over group-valued fields. Each step is
/// s <- exp(tau * sharp(R)) s with R the EP residual of reduce_jet(s) (the
/// negative L2 gradient), accepted by Armijo backtracking. Stalls are
/// reported when no step above min_step decreases the energy, which happens
/// once the decrease drops below the rounding level of the energy. Dirichlet boundary
/// nodes stay fixed. Throws NumericalError on a non-finite energy.
DescentState harmonic_descent(const ReducedLagrangian& l, const GroupField& s0, const DescentOptions& opts,
                              std::vector<DescentTraceRow>* trace = nullptr, const DescentObserver& observer = {});

// ---------------------------------------------------------------------------
// Equivalence of the variational principle and the EP equations.

struct EquivalenceTrial {
  double oracle;    ///< d/de E(exp(e xi) s)
  double pairing;   ///< integral <R, xi>
  double abs_error; ///< |oracle + pairing|
  double rel_error; ///< abs_error / max(1, |pairing|)
};

struct EquivalenceReport {
  std::uint64_t seed = 0;
  std::vector<EquivalenceTrial> trials;
  double max_rel_error = 0.0;
};

struct EquivalenceOptions {
  double eps = 1e-4;
  FourierSpec variation{3, 1.0};
  double support_radius = 0.3;
  /// Bump-supported variations; otherwise global Fourier fields (periodic
  /// grids only).
  bool compact_support = true;
};

EquivalenceReport verify_equivalence(const ReducedLagrangian& l, const GroupField& s, int trials, std::uint64_t seed,
                                     const EquivalenceOptions& opts = {});

}  // namespace covep
