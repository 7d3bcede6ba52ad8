#include "hypk/inequality_lab.hpp"
#include "hypk/prescribed_rhs.hpp"
#include "hypk/radial_graph.hpp"
#include "hypk/random.hpp"
#include "hypk/solver.hpp"
#include "hypk/surface_jet.hpp"
#include "hypk/symmfunc.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace hypk;

static EigenVector random_spectrum(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.uniform(-2.0, 2.0);
  return EigenVector(x);
}

static void BM_Sigma(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto lam = random_spectrum(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sigma(lam, n / 2));
}
BENCHMARK(BM_Sigma)->Arg(4)->Arg(8)->Arg(16);

static void BM_SigmaJet(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto lam = random_spectrum(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sigma_jet_diag(lam, n / 2));
}
BENCHMARK(BM_SigmaJet)->Arg(4)->Arg(8);

static void BM_ConcavityGap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ConstrainedConeSampler sampler(n, 3, 2, 0.5, 0.1, 3);
  const auto lam = sampler.next();
  Rng rng(4);
  const auto xi = rng.unit_vector(n);
  const ConcavityParams params{n, 3, 2, 0.5, 0.5, 0.5, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(concavity_gap(lam, xi, params));
}
BENCHMARK(BM_ConcavityGap)->Arg(4)->Arg(6);

static void BM_SurfaceJet(benchmark::State& state) {
  const auto g = RadialGraph::from_preset("tilted:1.0,0.1,0.05", GraphMode::kFullSphere, 2, 32, 64);
  const JetOptions opt{static_cast<int>(state.range(0)), FrameOrder::kForward};
  for (auto _ : state) benchmark::DoNotOptimize(surface_jet(g, {10, 7}, opt));
}
BENCHMARK(BM_SurfaceJet)->Arg(0)->Arg(1)->Arg(2);

static void BM_ResidualField(benchmark::State& state) {
  const int nt = static_cast<int>(state.range(0));
  const auto g = RadialGraph::from_preset("tilted:1.0,0.1,0.05", GraphMode::kFullSphere, 2, nt, 2 * nt);
  const auto rhs = PrescribedRHS::general("2.5 + 0.1 * nu_r");
  for (auto _ : state) benchmark::DoNotOptimize(residual_field(g, rhs, 2, 1));
}
BENCHMARK(BM_ResidualField)->Arg(16)->Arg(32);
BENCHMARK_MAIN();
