#include <benchmark/benchmark.h>

#include "dtnlab/born.hpp"
#include "dtnlab/reduction.hpp"

using namespace dtnlab;

namespace {

Potential zero_potential(const Domain& dom) {
  return Potential(dom, std::vector<double>(dom.num_interior(), 0.0), dom.dim() + 1);
}

void BM_DirichletSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Domain dom = build_square_domain(2, n, 1.0);
  Potential v = sample_potential(PotentialSpec::gaussian(0.5, {0, 0, 0}, 0.15), dom);
  DirichletSolver solver(v);
  Eigen::VectorXd f = Eigen::VectorXd::Ones(dom.num_boundary());
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(f));
}
BENCHMARK(BM_DirichletSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DtnAssembly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Domain dom = build_square_domain(2, n, 1.0);
  Potential v = sample_potential(PotentialSpec::gaussian(0.5, {0, 0, 0}, 0.15), dom);
  for (auto _ : state) benchmark::DoNotOptimize(dtn_map(v).kernel.sum());
}
BENCHMARK(BM_DtnAssembly)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GreenTable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Domain dom = build_square_domain(2, n, 1.0);
  ThetaPair pair = born_pair({4, 0, 0}, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(faddeev_green(pair.k(), dom).table.size());
}
BENCHMARK(BM_GreenTable)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FieldSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Domain dom = build_square_domain(2, n, 1.0);
  Potential v = sample_potential(PotentialSpec::gaussian(0.1, {0, 0, 0}, 0.2), dom);
  ThetaPair pair = born_pair({4, 0, 0}, 2);
  GreenTable g = faddeev_green(pair.k(), dom);
  for (auto _ : state)
    benchmark::DoNotOptimize(lippmann_schwinger(v, pair.k(), g).residual);
}
BENCHMARK(BM_FieldSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SpectrumFromData(benchmark::State& state) {
  Domain dom = build_square_domain(2, 64, 1.0);
  Potential v = sample_potential(PotentialSpec::gaussian(0.05, {0, 0, 0}, 0.15), dom);
  Eigen::MatrixXd dk = dtn_map(v).kernel - dtn_map(zero_potential(dom)).kernel;
  for (auto _ : state) benchmark::DoNotOptimize(vhat_from_dtn({3, 1, 0}, dk, dom));
}
BENCHMARK(BM_SpectrumFromData)->Unit(benchmark::kMicrosecond);

void BM_Transform(benchmark::State& state) {
  Domain dom = build_square_domain(2, 64, 1.0);
  FourierGrid fg(2, 50.0, 101);
  Potential v = sample_potential(PotentialSpec::gaussian(0.5, {0, 0, 0}, 0.15), dom);
  for (auto _ : state) benchmark::DoNotOptimize(fourier_transform(v, fg).values().size());
}
BENCHMARK(BM_Transform)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
