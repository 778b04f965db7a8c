#include "covep/errors.hpp"
#include "covep/reduction.hpp"
#include "covep/sections.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace covep;
using covep::test::box;
using covep::test::order;
using covep::test::torus;

namespace {

const FourierSpec kSmooth{3, 0.125};

double max_diff(const AlgebraOneForm& a, const AlgebraOneForm& b) { return (a - b).max_abs(); }

// Ad_g a for the matrix groups: rotate the coordinate vector.
AlgebraVector adjoint(const GroupModel& g, const GroupElement& x, const AlgebraVector& a) {
  const Eigen::Matrix3d r = g.kind() == GroupKind::SO3 ? x.rotation() : x.quaternion().toRotationMatrix();
  const Eigen::Vector3d v = r * Eigen::Vector3d(a[0], a[1], a[2]);
  return {v.x(), v.y(), v.z()};
}

GroupField geodesic(const BundlePtr& b, const AlgebraVector& xi, const GroupElement& g0) {
  GroupField s(b);
  const auto& grid = b->base();
  for (NodeIndex v = 0; v < s.node_count(); ++v) s[v] = b->group().multiply(b->group().exp(grid.coordinate(v, 0) * xi), g0);
  return s;
}

}  // namespace

TEST(ReduceJet, ConstantSectionHasZeroSigmaAndCurvature) {
  for (const auto& g : {GroupModel::su2(), GroupModel::so3(), GroupModel::abelian(2)}) {
    const auto b = torus(g, {8, 8});
    const GroupField s(b, g.exp(AlgebraVector::unit(g.dim(), 0)));
    const auto sigma = reduce_jet(s);
    EXPECT_LT(sigma.max_abs(), 1e-15);
    EXPECT_LT(curvature(sigma).max_abs(), 1e-15);
  }
}

TEST(ReduceJet, GeodesicHasConstantSigma) {
  for (const auto& g : {GroupModel::su2(), GroupModel::so3()}) {
    const auto b = box(g, {17});
    const AlgebraVector xi{0.8, -0.4, 1.1};
    const auto s = geodesic(b, xi, g.exp(AlgebraVector{0.2, 0.3, -0.1}));
    const auto sigma = reduce_jet(s);
    for (NodeIndex v = 0; v < s.node_count(); ++v) EXPECT_LT((sigma.component(v, 0) - xi).max_abs(), 1e-12);
  }
}

TEST(ReduceJet, InvariantUnderRightTranslation) {
  SeededRng rng(3);
  for (const auto& g : {GroupModel::su2(), GroupModel::so3()}) {
    const auto b = torus(g, {12, 10});
    const auto s = random_group_field(b, rng, FourierSpec{3, 0.5});
    const auto g0 = g.exp(AlgebraVector{1.0, -2.0, 0.5});
    GroupField t(b);
    for (NodeIndex v = 0; v < s.node_count(); ++v) t[v] = g.multiply(s[v], g0);
    EXPECT_LT(max_diff(reduce_jet(s), reduce_jet(t)), 1e-12);
  }
}

TEST(ReduceJet, LeftTranslationActsByAdjoint) {
  SeededRng rng(4);
  for (const auto& g : {GroupModel::su2(), GroupModel::so3()}) {
    const auto b = torus(g, {12, 10});
    const auto s = random_group_field(b, rng, FourierSpec{3, 0.5});
    const auto g0 = g.exp(AlgebraVector{1.0, -2.0, 0.5});
    GroupField t(b);
    for (NodeIndex v = 0; v < s.node_count(); ++v) t[v] = g.multiply(g0, s[v]);
    const auto p = reduce_jet(s), q = reduce_jet(t);
    for (NodeIndex v = 0; v < s.node_count(); ++v)
      for (int i = 0; i < 2; ++i) EXPECT_LT((q.component(v, i) - adjoint(g, g0, p.component(v, i))).max_abs(), 1e-12);
  }
}

TEST(ReduceJet, AbelianSigmaIsTheGradient) {
  const auto g = GroupModel::abelian(1);
  const auto b = box(g, {9, 7});
  GroupField s(b);
  const auto& grid = b->base();
  for (NodeIndex v = 0; v < s.node_count(); ++v) {
    const double x = grid.coordinate(v, 0), y = grid.coordinate(v, 1);
    s[v] = g.exp(AlgebraVector{2 * x + 3 * y});
  }
  const auto sigma = reduce_jet(s);
  for (NodeIndex v = 0; v < s.node_count(); ++v) {
    EXPECT_NEAR(sigma(v, 0, 0), 2.0, 1e-12);
    EXPECT_NEAR(sigma(v, 0, 1), 3.0, 1e-12);
  }
}

TEST(ReduceJet, FailureNamesTheNode) {
  const auto g = GroupModel::so3();
  const auto b = torus(g, {4});
  GroupField s(b);
  for (NodeIndex v = 0; v < 4; ++v) s[v] = g.exp(AlgebraVector{static_cast<double>(v) * std::numbers::pi, 0, 0});
  try {
    reduce_jet(s);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(Curvature, ConstantFormGivesTheBracket) {
  const auto g = GroupModel::su2();
  const auto b = torus(g, {6, 6, 6});
  AlgebraOneForm sigma(b);
  const AlgebraVector p[3] = {{0.3, -0.1, 0.7}, {-0.4, 0.9, 0.2}, {0.5, 0.5, -0.6}};
  for (NodeIndex v = 0; v < b->node_count(); ++v)
    for (int i = 0; i < 3; ++i) sigma.set_component(v, i, p[i]);
  const auto f = curvature(sigma);
  for (NodeIndex v = 0; v < b->node_count(); ++v)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const auto c = g.bracket(p[i], p[j]);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(f(v, k, i, j), c[k], 1e-15);
      }
}

TEST(Curvature, IsAntisymmetric) {
  SeededRng rng(5);
  const auto b = torus(GroupModel::so3(), {8, 8, 8});
  const auto f = curvature(random_one_form(b, rng, FourierSpec{3, 1.0}));
  for (NodeIndex v = 0; v < b->node_count(); ++v)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(f(v, k, i, i), 0.0);
        for (int j = 0; j < 3; ++j) EXPECT_EQ(f(v, k, i, j), -f(v, k, j, i));
      }
}

TEST(Curvature, AbelianExactFormIsFlatToRoundoff) {
  SeededRng rng(6);
  const auto b = torus(GroupModel::abelian(3), {16, 16});
  const auto s = random_group_field(b, rng, FourierSpec{3, 1.0});
  EXPECT_LT(curvature(reduce_jet(s)).max_abs(), 1e-11);
}

TEST(Curvature, ReducedSectionIsFlatToSecondOrder) {
  std::vector<double> err;
  for (int n : {32, 64}) {
    SeededRng rng(7);
    const auto b = torus(GroupModel::su2(), {n, n});
    err.push_back(curvature(reduce_jet(random_group_field(b, rng, kSmooth))).max_abs());
  }
  EXPECT_NEAR(order(err[0], err[1]), 2.0, 0.2);
}

TEST(CovariantDerivative, ConstantFieldsReduceToBrackets) {
  const auto g = GroupModel::su2();
  const auto b = torus(g, {5, 5});
  const AlgebraVector xi{0.2, 0.4, -0.3}, a0{1, 0, 0.5}, a1{0, -1, 2};
  const CoalgebraVector nu{0.7, -0.2, 0.1};
  AlgebraField eta(b);
  CoalgebraField psi(b);
  ConnectionForm a(b);
  for (NodeIndex v = 0; v < b->node_count(); ++v) {
    eta.set(v, xi);
    psi.set(v, nu);
    a.set_component(v, 0, a0);
    a.set_component(v, 1, a1);
  }
  const auto de = covariant_derivative_ad(eta, a);
  const auto dn = covariant_derivative_coad(psi, a);
  for (NodeIndex v = 0; v < b->node_count(); ++v) {
    EXPECT_LT((de.component(v, 0) - g.bracket(a0, xi)).max_abs(), 1e-15);
    EXPECT_LT((de.component(v, 1) - g.bracket(a1, xi)).max_abs(), 1e-15);
    // Pointwise duality: <nabla~ nu, xi> + <nu, nabla xi> = d<nu, xi> = 0.
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(pairing(dn.component(v, i), xi) + pairing(nu, de.component(v, i)), 0.0, 1e-15);
  }
}

TEST(Variation, IndependentOfTheConnection) {
  SeededRng rng(8);
  const auto b = torus(GroupModel::so3(), {10, 10});
  const auto sigma = random_one_form(b, rng, FourierSpec{3, 1.0});
  const auto eta = random_algebra_field(b, rng, FourierSpec{3, 1.0});
  const auto a = random_connection(b, rng, FourierSpec{3, 1.0});
  EXPECT_LT(max_diff(variation_delta_sigma(sigma, eta, a), variation_delta_sigma(sigma, eta, zero_connection(b))), 1e-13);
}

TEST(Variation, MatchesDerivativeOfTheReducedJet) {
  auto error = [](int n) {
    SeededRng rng(9);
    const auto b = torus(GroupModel::su2(), {n, n});
    const auto s = random_group_field(b, rng, kSmooth);
    const auto eta = random_algebra_field(b, rng, kSmooth);
    const double eps = 1e-5;
    auto fd = reduce_jet(flow_section(s, eta, eps)) - reduce_jet(flow_section(s, eta, -eps));
    fd *= 1.0 / (2 * eps);
    return max_diff(fd, variation_delta_sigma(reduce_jet(s), eta, zero_connection(b)));
  };
  const double e1 = error(32), e2 = error(64);
  EXPECT_NEAR(order(e1, e2), 2.0, 0.3);
}

TEST(Reconstruct, RecoversAGeodesicExactly) {
  for (const auto& g : {GroupModel::su2(), GroupModel::so3()}) {
    const auto b = box(g, {33});
    const auto g0 = g.exp(AlgebraVector{0.2, 0.3, -0.1});
    const auto s = geodesic(b, AlgebraVector{0.8, -0.4, 1.1}, g0);
    const auto r = reconstruct_section(reduce_jet(s), g0, 0);
    for (NodeIndex v = 0; v < s.node_count(); ++v) EXPECT_LT(payload_distance(r[v], s[v]), 1e-12);
  }
}

TEST(Reconstruct, RecoversAffineAbelianSectionsExactly) {
  const auto g = GroupModel::abelian(2);
  const auto b = box(g, {12, 9});
  const auto& grid = b->base();
  GroupField s(b);
  for (NodeIndex v = 0; v < s.node_count(); ++v) {
    const double x = grid.coordinate(v, 0), y = grid.coordinate(v, 1);
    s[v] = g.exp(AlgebraVector{2 * x - y + 0.5, 0.25 * x + 3 * y});
  }
  const NodeIndex base = grid.linear_index({5, 4, 0});
  const auto r = reconstruct_section(reduce_jet(s), s[base], base);
  for (NodeIndex v = 0; v < s.node_count(); ++v) EXPECT_LT(payload_distance(r[v], s[v]), 1e-12);
}

TEST(Reconstruct, ErrorIsSecondOrderForSmoothSections) {
  std::vector<double> err;
  for (int n : {32, 64}) {
    SeededRng rng(10);
    const auto b = torus(GroupModel::su2(), {n, n});
    const auto s = random_group_field(b, rng, kSmooth);
    const auto r = reconstruct_section(reduce_jet(s), s[0], 0, 1.0);
    double e = 0.0;
    for (NodeIndex v = 0; v < s.node_count(); ++v) e = std::max(e, payload_distance(r[v], s[v]));
    err.push_back(e);
  }
  EXPECT_NEAR(order(err[0], err[1]), 2.0, 0.2);
}

TEST(Reconstruct, RefusesCurvedForms) {
  const auto g = GroupModel::su2();
  const auto b = torus(g, {6, 6});
  AlgebraOneForm sigma(b);
  for (NodeIndex v = 0; v < b->node_count(); ++v) {
    sigma.set_component(v, 0, AlgebraVector{1, 0, 0});
    sigma.set_component(v, 1, AlgebraVector{0, 1, 0});
  }
  EXPECT_THROW(reconstruct_section(sigma, g.identity(), 0), FlatnessError);
  EXPECT_THROW(reconstruct_section(sigma, g.identity(), 1000, 10.0), ContractViolation);
}

TEST(BundleFields, MixingBundlesIsAContractViolation) {
  const auto a = torus(GroupModel::su2(), {6, 6});
  const auto b = torus(GroupModel::su2(), {6, 7});
  EXPECT_THROW(AlgebraOneForm(a) + AlgebraOneForm(b), ContractViolation);
  EXPECT_NO_THROW(AlgebraOneForm(a) + AlgebraOneForm(torus(GroupModel::su2(), {6, 6})));
}
