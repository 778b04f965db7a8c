#include "covep/errors.hpp"
#include "covep/reduction.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace covep;
using covep::test::box;
using covep::test::grid_config;
using covep::test::torus;

namespace {

BundlePtr curved_bundle(const GroupModel& g, int n) {
  GridConfig c = grid_config({n, n}, Boundary::Periodic);
  c.metric.family = "diag_periodic";
  c.metric.a = 1.5;
  c.metric.b = 0.5;
  return make_bundle(build_grid(c), g);
}

GroupModel weighted_so3() {
  AlgebraMatrix h(3, 3);
  h << 1.0, 0.2, 0.0, 0.2, 2.0, 0.1, 0.0, 0.1, 3.0;
  return GroupModel::so3().with_metric(h);
}

OneFormValue sample_value(int m, int n) {
  OneFormValue p(m, n);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) p(a, i) = std::sin(1.0 + a * 0.7 + i * 1.3);
  return p;
}

}  // namespace

TEST(ReducedLagrangian, HarmonicDensityMatchesHandComputation) {
  const auto b = curved_bundle(weighted_so3(), 8);
  const auto l = ReducedLagrangian::harmonic();
  const auto p = sample_value(3, 2);
  const auto& grid = b->base();
  const auto& h = b->group().metric();
  for (NodeIndex v = 0; v < b->node_count(); v += 5) {
    double expected = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c) expected += 0.5 * grid.metric_inverse(v, i, j) * p(a, i) * h(a, c) * p(c, j);
    EXPECT_NEAR(l.density(*b, v, p), expected, 1e-14);
  }
}

TEST(ReducedLagrangian, AnalyticFiberDerivativeMatchesFiniteDifferences) {
  const auto b = curved_bundle(weighted_so3(), 8);
  const auto harmonic = ReducedLagrangian::harmonic();
  const auto fd = ReducedLagrangian::custom(
      "harmonic_fd", [&](const TrivialBundle& bb, NodeIndex v, const OneFormValue& p) { return harmonic.density(bb, v, p); });
  EXPECT_TRUE(harmonic.has_analytic_derivative());
  EXPECT_FALSE(fd.has_analytic_derivative());
  const auto p = sample_value(3, 2);
  for (NodeIndex v = 0; v < b->node_count(); v += 7) {
    const CoOneFormValue d = harmonic.fiber_derivative(*b, v, p) - fd.fiber_derivative(*b, v, p);
    EXPECT_LT(d.cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ReducedLagrangian, CustomNeedsADensity) {
  EXPECT_THROW(ReducedLagrangian::custom("empty", {}), ContractViolation);
}

TEST(ReducedEnergy, GeodesicEnergyIsHalfTheSquaredSpeed) {
  const auto g = GroupModel::su2();
  const auto b = box(g, {21});
  const AlgebraVector xi{0.8, -0.4, 1.1};
  GroupField s(b);
  for (NodeIndex v = 0; v < s.node_count(); ++v) s[v] = g.exp(b->base().coordinate(v, 0) * xi);
  const double speed2 = 0.8 * 0.8 + 0.4 * 0.4 + 1.1 * 1.1;
  EXPECT_NEAR(reduced_energy(ReducedLagrangian::harmonic(), reduce_jet(s)), 0.5 * speed2, 1e-12);
}

// For R^1 on a flat torus, sigma = D u and R = sum_i D_i D_i u with the
// central difference D, i.e. the wide Laplacian stencil.
TEST(EpResidual, AbelianResidualIsTheWideLaplacian) {
  const auto g = GroupModel::abelian(1);
  const auto b = torus(g, {12, 10});
  const auto& grid = b->base();
  SeededRng rng(11);
  const auto s = random_group_field(b, rng, FourierSpec{3, 1.0});
  const auto r = ep_residual(ReducedLagrangian::harmonic(), reduce_jet(s), zero_connection(b));
  auto u = [&](NodeIndex v) { return s[v].translation()[0]; };
  for (NodeIndex v = 0; v < grid.node_count(); ++v) {
    double lap = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double h = grid.spacing(i);
      lap += (u(grid.neighbor(v, i, 2)) - 2 * u(v) + u(grid.neighbor(v, i, -2))) / (4 * h * h);
    }
    EXPECT_NEAR(r(v, 0), lap, 1e-10 * std::max(1.0, std::abs(lap)));
  }
}

TEST(EpResidual, IndependentOfTheConnection) {
  SeededRng rng(12);
  const auto b = curved_bundle(weighted_so3(), 12);
  const auto sigma = reduce_jet(random_group_field(b, rng, FourierSpec{3, 0.5}));
  const auto a = random_connection(b, rng, FourierSpec{3, 1.0});
  const auto l = ReducedLagrangian::harmonic();
  EXPECT_LT((ep_residual(l, sigma, a) - ep_residual(l, sigma, zero_connection(b))).max_abs(), 1e-10);
}

TEST(EpResidual, GeodesicIsAnInteriorSolution) {
  for (const auto& g : {GroupModel::su2(), GroupModel::so3()}) {
    const auto b = box(g, {17});
    GroupField s(b);
    for (NodeIndex v = 0; v < s.node_count(); ++v) s[v] = g.exp(b->base().coordinate(v, 0) * AlgebraVector{0.5, 1.0, -0.7});
    const auto r = ep_residual(ReducedLagrangian::harmonic(), reduce_jet(s), zero_connection(b));
    for (NodeIndex v = 0; v < s.node_count(); ++v)
      if (!b->base().on_boundary(v)) EXPECT_LT(r.at(v).max_abs(), 1e-11);
  }
}

TEST(EpResidual, CoadjointTermVanishesForBiInvariantMetrics) {
  SeededRng rng(13);
  const auto b = torus(GroupModel::su2(), {10, 10});
  const auto sigma = reduce_jet(random_group_field(b, rng, FourierSpec{3, 1.0}));
  const auto mu = fiber_derivative(ReducedLagrangian::harmonic(), sigma);
  EXPECT_LT(coadjoint_term(sigma, mu, zero_connection(b)).max_abs(), 1e-14);
  const auto w = curved_bundle(weighted_so3(), 10);
  const auto sw = reduce_jet(random_group_field(w, rng, FourierSpec{3, 1.0}));
  EXPECT_GT(coadjoint_term(sw, fiber_derivative(ReducedLagrangian::harmonic(), sw), zero_connection(w)).max_abs(), 1e-3);
}

TEST(VariationalIdentity, AbelianResidualIsTheExactDiscreteGradient) {
  const auto g = GroupModel::abelian(2);
  for (const bool periodic : {true, false}) {
    const auto b = periodic ? torus(g, {16, 12}) : box(g, {16, 12});
    SeededRng rng(14);
    const auto s = random_group_field(b, rng, FourierSpec{3, 1.0});
    const auto eta = random_compact_algebra_field(b, rng, FourierSpec{3, 1.0});
    const auto l = ReducedLagrangian::harmonic();
    const double oracle = energy_gradient_oracle(l, s, eta, 1e-4);
    const double pair = pairing_integral(ep_residual(l, reduce_jet(s), zero_connection(b)), eta);
    EXPECT_NEAR(oracle, -pair, 1e-8 * std::max(1.0, std::abs(pair)));
  }
}

TEST(VariationalIdentity, NonAbelianMismatchShrinksWithTheGrid) {
  auto mismatch = [](int n) {
    const auto b = curved_bundle(weighted_so3(), n);
    SeededRng rng(15);
    const auto s = random_group_field(b, rng, FourierSpec{3, 0.5});
    const auto eta = random_compact_algebra_field(b, rng, FourierSpec{3, 0.5});
    const auto l = ReducedLagrangian::harmonic();
    return std::abs(energy_gradient_oracle(l, s, eta, 1e-4) +
                    pairing_integral(ep_residual(l, reduce_jet(s), zero_connection(b)), eta));
  };
  const double e1 = mismatch(24), e2 = mismatch(48);
  EXPECT_LT(e2, e1 / 3.0);
}

TEST(EnergyGradientOracle, Contracts) {
  const auto g = GroupModel::su2();
  const auto b = box(g, {8, 8});
  const GroupField s(b, g.identity());
  AlgebraField eta(b);
  const auto l = ReducedLagrangian::harmonic();
  EXPECT_THROW(energy_gradient_oracle(l, s, eta, 1e-2), ContractViolation);
  EXPECT_THROW(energy_gradient_oracle(l, s, eta, 1e-9), ContractViolation);
  EXPECT_NO_THROW(energy_gradient_oracle(l, s, eta, 1e-4));
  eta(0, 1) = 1.0;
  EXPECT_THROW(energy_gradient_oracle(l, s, eta, 1e-4), ContractViolation);
}

TEST(FlowSection, ZeroStepIsTheIdentity) {
  SeededRng rng(16);
  const auto b = torus(GroupModel::so3(), {6, 6});
  const auto s = random_group_field(b, rng, FourierSpec{3, 1.0});
  const auto eta = random_algebra_field(b, rng, FourierSpec{3, 1.0});
  const auto t = flow_section(s, eta, 0.0);
  for (NodeIndex v = 0; v < s.node_count(); ++v) EXPECT_LT(payload_distance(s[v], t[v]), 1e-15);
}
