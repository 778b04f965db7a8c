#include "covep/errors.hpp"
#include "covep/manifold.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace covep;
using covep::test::grid_config;
using covep::test::order;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridConfig curved(int n, double a = 1.5, double b = 0.5) {
  GridConfig c = grid_config({n, n}, Boundary::Periodic);
  c.metric.family = "diag_periodic";
  c.metric.a = a;
  c.metric.b = b;
  return c;
}

double derivative_error(int n, Boundary bc) {
  const auto grid = build_grid(grid_config({n}, bc));
  ScalarField f(grid.node_count(), 1);
  for (NodeIndex v = 0; v < grid.node_count(); ++v) f(v, 0) = std::sin(kTwoPi * grid.coordinate(v, 0));
  const auto df = partial_derivative(grid, f, 0);
  double err = 0.0;
  for (NodeIndex v = 0; v < grid.node_count(); ++v)
    err = std::max(err, std::abs(df(v, 0) - kTwoPi * std::cos(kTwoPi * grid.coordinate(v, 0))));
  return err;
}

// div of X = (sin 2 pi x, cos 2 pi y) for g = diag(f(y), 1): the log sqrt(f)
// term contributes f'/(2 f) X^2.
double divergence_error(int n, bool christoffel_form) {
  const double a = 1.5, b = 0.5;
  const auto grid = build_grid(curved(n, a, b));
  VectorField x(grid.node_count(), 2);
  for (NodeIndex v = 0; v < grid.node_count(); ++v) {
    x(v, 0) = std::sin(kTwoPi * grid.coordinate(v, 0));
    x(v, 1) = std::cos(kTwoPi * grid.coordinate(v, 1));
  }
  const auto div = christoffel_form ? divergence_christoffel_form(grid, x) : riemannian_divergence(grid, x);
  double err = 0.0;
  for (NodeIndex v = 0; v < grid.node_count(); ++v) {
    const double px = grid.coordinate(v, 0), py = grid.coordinate(v, 1);
    const double f = a + b * std::sin(kTwoPi * py);
    const double df = b * kTwoPi * std::cos(kTwoPi * py);
    const double exact = kTwoPi * std::cos(kTwoPi * px) - kTwoPi * std::sin(kTwoPi * py) + df / (2 * f) * std::cos(kTwoPi * py);
    err = std::max(err, std::abs(div(v, 0) - exact));
  }
  return err;
}

}  // namespace

TEST(MetricGrid, SpacingAndIndexing) {
  const auto p = build_grid(grid_config({8, 5}, Boundary::Periodic, {2.0, 1.0}));
  EXPECT_DOUBLE_EQ(p.spacing(0), 0.25);
  EXPECT_DOUBLE_EQ(p.spacing(1), 0.2);
  EXPECT_EQ(p.node_count(), 40u);
  const auto d = build_grid(grid_config({5, 5}, Boundary::Dirichlet));
  EXPECT_DOUBLE_EQ(d.spacing(0), 0.25);
  for (NodeIndex v = 0; v < p.node_count(); ++v) EXPECT_EQ(p.linear_index(p.multi_index(v)), v);
}

TEST(MetricGrid, PeriodicNeighborsWrap) {
  const auto grid = build_grid(grid_config({6, 4}, Boundary::Periodic));
  const NodeIndex corner = grid.linear_index({0, 0, 0});
  EXPECT_EQ(grid.multi_index(grid.neighbor(corner, 0, -1))[0], 5);
  EXPECT_EQ(grid.multi_index(grid.neighbor(corner, 1, -1))[1], 3);
  EXPECT_EQ(grid.neighbor(grid.neighbor(corner, 1, 5), 1, -1), grid.neighbor(corner, 1, 0));
}

TEST(MetricGrid, DirichletNeighborOutsideBoxIsRejected) {
  const auto grid = build_grid(grid_config({6, 4}, Boundary::Dirichlet));
  EXPECT_THROW(grid.neighbor(0, 0, -1), ContractViolation);
  EXPECT_TRUE(grid.on_boundary(0));
  EXPECT_FALSE(grid.on_boundary(grid.linear_index({2, 2, 0})));
}

TEST(MetricGrid, RejectsInvalidConfigurations) {
  EXPECT_THROW(build_grid(grid_config({2, 8}, Boundary::Periodic)), ConstructionError);
  EXPECT_THROW(build_grid(grid_config({8}, Boundary::Periodic, {-1.0})), ConstructionError);
  EXPECT_THROW(build_grid(grid_config({4, 4, 4, 4}, Boundary::Periodic)), ConstructionError);
  GridConfig c = grid_config({8}, Boundary::Periodic);
  c.metric.family = "hyperbolic";
  EXPECT_THROW(build_grid(c), ConstructionError);
  c.metric.family = "diag_periodic";
  c.metric.b = 0.5;
  EXPECT_THROW(build_grid(c), ConstructionError);
}

TEST(MetricGrid, NonPositiveMetricNamesTheNode) {
  try {
    build_grid(curved(16, 0.5, 1.0));
    FAIL() << "expected ConstructionError";
  } catch (const ConstructionError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(MetricGrid, TableMetricIsCheckedPerNode) {
  GridConfig c = grid_config({4}, Boundary::Periodic);
  c.metric.family = "table";
  c.metric.table = {1.0, 2.0, 3.0};
  EXPECT_THROW(build_grid(c), ConstructionError);
  c.metric.table = {1.0, 2.0, -3.0, 4.0};
  EXPECT_THROW(build_grid(c), ConstructionError);
  c.metric.table = {1.0, 4.0, 9.0, 16.0};
  const auto grid = build_grid(c);
  EXPECT_DOUBLE_EQ(grid.sqrt_det(2), 3.0);
  EXPECT_TRUE(grid.christoffel_from_finite_differences());
}

TEST(PartialDerivative, SecondOrderOnPeriodicAndDirichletGrids) {
  for (const Boundary bc : {Boundary::Periodic, Boundary::Dirichlet}) {
    const double e1 = derivative_error(32, bc), e2 = derivative_error(64, bc), e3 = derivative_error(128, bc);
    EXPECT_NEAR(order(e1, e2), 2.0, 0.15);
    EXPECT_NEAR(order(e2, e3), 2.0, 0.15);
  }
}

TEST(PartialDerivative, DirichletStencilsAreExactOnQuadratics) {
  const auto grid = build_grid(grid_config({7, 5}, Boundary::Dirichlet, {1.0, 3.0}));
  ScalarField f(grid.node_count(), 1);
  for (NodeIndex v = 0; v < grid.node_count(); ++v) {
    const double x = grid.coordinate(v, 0), y = grid.coordinate(v, 1);
    f(v, 0) = 3 * x * x - 2 * x + 1 + 0.5 * y * y + x * y;
  }
  const auto fx = partial_derivative(grid, f, 0);
  const auto fy = partial_derivative(grid, f, 1);
  for (NodeIndex v = 0; v < grid.node_count(); ++v) {
    const double x = grid.coordinate(v, 0), y = grid.coordinate(v, 1);
    EXPECT_NEAR(fx(v, 0), 6 * x - 2 + y, 1e-12);
    EXPECT_NEAR(fy(v, 0), y + x, 1e-12);
  }
}

TEST(PartialDerivative, ContractChecks) {
  const auto grid = build_grid(grid_config({8}, Boundary::Periodic));
  EXPECT_THROW(partial_derivative(grid, ScalarField(grid.node_count(), 1), 1), ContractViolation);
  EXPECT_THROW(partial_derivative(grid, ScalarField(3, 1), 0), ContractViolation);
}

TEST(Divergence, BothFormsConvergeToTheAnalyticDivergence) {
  for (const bool christoffel : {false, true}) {
    const double e1 = divergence_error(32, christoffel), e2 = divergence_error(64, christoffel),
                 e3 = divergence_error(128, christoffel);
    EXPECT_NEAR(order(e1, e2), 2.0, 0.2);
    EXPECT_NEAR(order(e2, e3), 2.0, 0.2);
    EXPECT_LT(e3, 1e-2);
  }
}

TEST(Divergence, AnalyticAndFiniteDifferenceChristoffelsAgreeToSecondOrder) {
  auto diff = [](int n) {
    const auto a = build_grid(curved(n));
    const auto f = build_grid(curved(n), ChristoffelSource::FiniteDifference);
    EXPECT_FALSE(a.christoffel_from_finite_differences());
    EXPECT_TRUE(f.christoffel_from_finite_differences());
    double e = 0.0;
    for (NodeIndex v = 0; v < a.node_count(); ++v)
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) e = std::max(e, std::abs(a.christoffel(v, k, i, j) - f.christoffel(v, k, i, j)));
    return e;
  };
  EXPECT_NEAR(order(diff(32), diff(64)), 2.0, 0.15);
}

TEST(Divergence, ChristoffelSymbolsAreSymmetric) {
  const auto grid = build_grid(curved(16));
  for (NodeIndex v = 0; v < grid.node_count(); ++v)
    for (int k = 0; k < 2; ++k) EXPECT_EQ(grid.christoffel(v, k, 0, 1), grid.christoffel(v, k, 1, 0));
}

TEST(Integrate, PeriodicVolumeMatchesQuadratureOracle) {
  const double a = 1.5, b = 0.5;
  const auto grid = build_grid(curved(64, a, b));
  ScalarField one(grid.node_count(), 1, 1.0);
  // Composite Simpson on a fine 1-D grid for int_0^1 sqrt(a + b sin 2 pi y) dy.
  const int m = 20000;
  double s = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += w * std::sqrt(a + b * std::sin(kTwoPi * k / m));
  }
  s /= 3.0 * m;
  EXPECT_NEAR(integrate(grid, one), s, 1e-10);
}

TEST(Integrate, DirichletTrapezoidIsExactOnBilinears) {
  const auto grid = build_grid(grid_config({9, 5}, Boundary::Dirichlet, {2.0, 1.0}));
  ScalarField f(grid.node_count(), 1);
  for (NodeIndex v = 0; v < grid.node_count(); ++v) f(v, 0) = 1.0 + grid.coordinate(v, 0) * grid.coordinate(v, 1);
  // int_0^2 int_0^1 (1 + x y) = 2 + 1
  EXPECT_NEAR(integrate(grid, f), 3.0, 1e-13);
  EXPECT_THROW(integrate(grid, ScalarField(grid.node_count(), 2)), ContractViolation);
}
