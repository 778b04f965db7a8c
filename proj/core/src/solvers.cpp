#include "covep/solvers.hpp"

#include "covep/errors.hpp"
#include "covep/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace covep {

RigidBodyState classical_ep_step(const GroupModel& body, const RigidBodyState& state, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("classical_ep_step: dt must be positive");
  auto rhs = [&](const CoalgebraVector& mu) { return -body.coad(body.sharp(mu), mu); };
  const CoalgebraVector& y = state.mu;
  const CoalgebraVector k1 = rhs(y);
  const CoalgebraVector k2 = rhs(y + (0.5 * dt) * k1);
  const CoalgebraVector k3 = rhs(y + (0.5 * dt) * k2);
  const CoalgebraVector k4 = rhs(y + dt * k3);
  return {state.t + dt, y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};
}

double rigid_body_energy(const GroupModel& body, const CoalgebraVector& mu) {
  return 0.5 * pairing(mu, body.sharp(mu));
}

const char* to_string(DescentStatus status) {
  switch (status) {
    case DescentStatus::Converged:
      return "converged";
    case DescentStatus::MaxIterations:
      return "max_iterations";
    case DescentStatus::Stalled:
      return "stalled";
  }
  return "unknown";
}

namespace {

struct Evaluation {
  AlgebraOneForm sigma;
  CoalgebraField residual;
  double energy;
  double norm2;
};

Evaluation evaluate(const ReducedLagrangian& l, const GroupField& s, const ConnectionForm& zero) {
  AlgebraOneForm sigma = reduce_jet(s);
  const double e = reduced_energy(l, sigma);
  if (!std::isfinite(e)) throw NumericalError("harmonic_descent: non-finite energy");
  CoalgebraField r = ep_residual(l, sigma, zero);
  const auto& grid = s.grid();
  const auto& g = s.group();
  double norm2 = 0.0;
  for (NodeIndex v = 0; v < s.node_count(); ++v) {
    if (grid.on_boundary(v)) {
      r.set(v, CoalgebraVector(g.dim()));
      continue;
    }
    const CoalgebraVector rv = r.at(v);
    norm2 += grid.quadrature_weight(v) * pairing(rv, g.sharp(rv));
  }
  if (!std::isfinite(norm2)) throw NumericalError("harmonic_descent: non-finite residual");
  return {std::move(sigma), std::move(r), e, norm2};
}

// sum_v w_v <a_v, sharp b_v>
double weighted_dot(const MetricGrid& grid, const GroupModel& g, const CoalgebraField& a, const CoalgebraField& b) {
  double sum = 0.0;
  for (NodeIndex v = 0; v < a.node_count(); ++v) sum += grid.quadrature_weight(v) * pairing(a.at(v), g.sharp(b.at(v)));
  return sum;
}

}  // namespace

DescentState harmonic_descent(const ReducedLagrangian& l, const GroupField& s0, const DescentOptions& opts,
                              std::vector<DescentTraceRow>* trace, const DescentObserver& observer) {
  if (opts.max_iter < 0 || !(opts.grad_tol >= 0.0) || !(opts.initial_step > 0.0) ||
      !(opts.backtracking > 0.0 && opts.backtracking < 1.0) || !(opts.armijo > 0.0 && opts.armijo < 1.0))
    throw ContractViolation("harmonic_descent: invalid options");
  const auto& g = s0.group();
  const ConnectionForm zero = zero_connection(s0.bundle());

  DescentState state{0, s0, 0.0, 0.0, opts.initial_step, DescentStatus::MaxIterations};
  Evaluation cur = evaluate(l, state.field, zero);
  state.energy = cur.energy;
  state.residual_norm = std::sqrt(cur.norm2);

  auto record = [&]() {
    if (trace) trace->push_back({state.iteration, state.energy, state.residual_norm, state.step});
    if (observer)
      observer({state.iteration, state.field, cur.sigma, cur.residual, state.energy, state.residual_norm});
  };
  record();

  const auto& grid = s0.grid();
  double tau = opts.initial_step;
  std::optional<CoalgebraField> prev_residual;
  double prev_tau = 0.0;
  while (true) {
    if (state.residual_norm <= opts.grad_tol) {
      state.status = DescentStatus::Converged;
      return state;
    }
    if (state.iteration >= opts.max_iter) {
      state.status = DescentStatus::MaxIterations;
      return state;
    }
    if (prev_residual && opts.step_rule == StepRule::BarzilaiBorwein) {
      // s = prev_tau * r_prev and y = -(r - r_prev) in the weighted metric.
      const CoalgebraField diff = *prev_residual - cur.residual;
      const double sy = prev_tau * weighted_dot(grid, g, *prev_residual, diff);
      const double ss = prev_tau * prev_tau * weighted_dot(grid, g, *prev_residual, *prev_residual);
      tau = sy > 0.0 ? std::min(opts.initial_step, ss / sy) : std::min(opts.initial_step, 2.0 * prev_tau);
    }
    GroupField trial = state.field;
    bool accepted = false;
    std::optional<Evaluation> next;
    while (tau >= opts.min_step) {
      for (NodeIndex v = 0; v < trial.node_count(); ++v)
        trial[v] = g.multiply(g.exp(tau * g.sharp(cur.residual.at(v))), state.field[v]);
      next = evaluate(l, trial, zero);
      if (next->energy < cur.energy && next->energy <= cur.energy - opts.armijo * tau * cur.norm2) {
        accepted = true;
        break;
      }
      tau *= opts.backtracking;
    }
    if (!accepted) {
      state.status = DescentStatus::Stalled;
      return state;
    }
    state.field = std::move(trial);
    prev_residual = std::move(cur.residual);
    prev_tau = tau;
    cur = std::move(*next);
    state.iteration += 1;
    state.energy = cur.energy;
    state.residual_norm = std::sqrt(cur.norm2);
    state.step = tau;
    record();
    tau = std::min(opts.initial_step, 2.0 * tau);
  }
}

EquivalenceReport verify_equivalence(const ReducedLagrangian& l, const GroupField& s, int trials, std::uint64_t seed,
                                     const EquivalenceOptions& opts) {
  if (trials < 1) throw ContractViolation("verify_equivalence: need at least one trial");
  const auto& grid = s.grid();
  if (!opts.compact_support && grid.boundary() == Boundary::Dirichlet)
    throw ContractViolation("verify_equivalence: global variations need a periodic grid");
  const AlgebraOneForm sigma = reduce_jet(s);
  const CoalgebraField r = ep_residual(l, sigma, zero_connection(s.bundle()));

  EquivalenceReport report;
  report.seed = seed;
  SeededRng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const AlgebraField eta = opts.compact_support
                                 ? random_compact_algebra_field(s.bundle(), rng, opts.variation, opts.support_radius)
                                 : random_algebra_field(s.bundle(), rng, opts.variation);
    EquivalenceTrial trial{};
    trial.oracle = energy_gradient_oracle(l, s, eta, opts.eps);
    trial.pairing = pairing_integral(r, eta);
    trial.abs_error = std::abs(trial.oracle + trial.pairing);
    trial.rel_error = trial.abs_error / std::max(1.0, std::abs(trial.pairing));
    report.max_rel_error = std::max(report.max_rel_error, trial.rel_error);
    report.trials.push_back(trial);
  }
  return report;
}

}  // namespace covep
