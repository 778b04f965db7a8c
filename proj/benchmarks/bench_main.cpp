#include "covep/random_fields.hpp"
#include "covep/reduction.hpp"
#include "covep/solvers.hpp"

#include <benchmark/benchmark.h>

using namespace covep;

namespace {

BundlePtr su2_torus(int n) {
  GridConfig c;
  c.dims = 2;
  c.shape = {n, n};
  c.extent = {1.0, 1.0};
  return make_bundle(build_grid(c), GroupModel::su2());
}

GroupField section(const BundlePtr& b) {
  SeededRng rng(1);
  return random_group_field(b, rng, FourierSpec{3, 0.5});
}

void BM_ReduceJet(benchmark::State& state) {
  const auto s = section(su2_torus(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(reduce_jet(s));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.node_count()));
}
BENCHMARK(BM_ReduceJet)->Arg(32)->Arg(64)->Arg(128);

void BM_Curvature(benchmark::State& state) {
  const auto sigma = reduce_jet(section(su2_torus(static_cast<int>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(curvature(sigma));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sigma.node_count()));
}
BENCHMARK(BM_Curvature)->Arg(32)->Arg(64)->Arg(128);

void BM_EpResidual(benchmark::State& state) {
  const auto b = su2_torus(static_cast<int>(state.range(0)));
  const auto sigma = reduce_jet(section(b));
  const auto a = zero_connection(b);
  const auto l = ReducedLagrangian::harmonic();
  for (auto _ : state) benchmark::DoNotOptimize(ep_residual(l, sigma, a));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sigma.node_count()));
}
BENCHMARK(BM_EpResidual)->Arg(32)->Arg(64)->Arg(128);

void BM_DescentIterations(benchmark::State& state) {
  GridConfig c;
  c.dims = 2;
  c.shape = {32, 32};
  c.extent = {1.0, 1.0};
  c.boundary = Boundary::Dirichlet;
  const auto b = make_bundle(build_grid(c), GroupModel::su2());
  const auto s0 = section(b);
  DescentOptions opts;
  opts.max_iter = 10;
  opts.grad_tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_descent(ReducedLagrangian::harmonic(), s0, opts));
}
BENCHMARK(BM_DescentIterations);

void BM_RigidBodyStep(benchmark::State& state) {
  AlgebraMatrix h = AlgebraMatrix::Zero(3, 3);
  h.diagonal() << 1, 2, 3;
  const auto body = GroupModel::so3().with_metric(h);
  RigidBodyState st{0.0, CoalgebraVector{1, 1, 1}};
  for (auto _ : state) {
    st = classical_ep_step(body, st, 1e-3);
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_RigidBodyStep);

}  // namespace

BENCHMARK_MAIN();
