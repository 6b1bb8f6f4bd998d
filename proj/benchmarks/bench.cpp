#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "semiwell/agmon.hpp"
#include "semiwell/spectral.hpp"
#include "semiwell/wells.hpp"

using namespace semiwell;

namespace {

GridModel ring(int n) {
  return build_grid(
      1, {n}, 2.0 / n, Boundary::periodic_torus,
      [](const std::array<double, 2>& x) {
        double s = std::sin(std::numbers::pi * x[0]);
        return s * s;
      },
      [](const std::array<double, 2>&) { return std::array<double, 2>{0, 0}; });
}

void BM_AssembleHamiltonian(benchmark::State& state) {
  GridModel m = ring((int)state.range(0));
  for (auto _ : state) {
    SparseHermitian H = assemble_hamiltonian(m, 200.0);
    benchmark::DoNotOptimize(H.mat);
  }
}
BENCHMARK(BM_AssembleHamiltonian)->Arg(512)->Arg(2048)->Arg(8192);

void BM_AgmonDistance(benchmark::State& state) {
  GridModel m = ring((int)state.range(0));
  WellDecomposition d = find_wells(m, 0.9);
  std::vector<int> src = d.core(0, 0.75);
  for (auto _ : state) {
    ScalarField f = agmon_distance(m, 0.6, src);
    benchmark::DoNotOptimize(f.values);
  }
}
BENCHMARK(BM_AgmonDistance)->Arg(512)->Arg(2048)->Arg(8192);

void BM_EigWindow(benchmark::State& state) {
  GridModel m = ring((int)state.range(0));
  SparseHermitian H = assemble_hamiltonian(m, 200.0);
  for (auto _ : state) {
    SpectralWindow w = eig_window(H, -1e-9, 100.0);
    benchmark::DoNotOptimize(w.eigenvalues);
  }
}
BENCHMARK(BM_EigWindow)->Arg(256)->Arg(512)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
