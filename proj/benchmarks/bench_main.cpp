#include <complex>

#include <benchmark/benchmark.h>

#include "ladderqed/band_structure.hpp"
#include "ladderqed/bound_states.hpp"
#include "ladderqed/dynamics.hpp"
#include "ladderqed/ladder_lattice.hpp"

using namespace ladderqed;

namespace {

LadderParams ladder(int N) {
  LadderParams p;
  p.N = N;
  return p;
}

void BM_BuildLattice(benchmark::State& state) {
  const auto p = ladder(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_lattice(p));
}
BENCHMARK(BM_BuildLattice)->Arg(400)->Arg(1000)->Arg(10000);

// Unit of simulated time for the small emitter on an N-rung ladder.
void BM_PropagateUnitTime(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto system = assemble_system(ladder(N), {EmitterSpec::small(-2.042, 0.4, Site{N / 2, Leg::A})});
  const auto initial = SystemState::excited(system, 0);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(system, initial, 1.0, 0.0, Observer{}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(system.dimension()));
}
BENCHMARK(BM_PropagateUnitTime)->Arg(400)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_SelfEnergyQuadrature(benchmark::State& state) {
  const auto p = ladder(400);
  const auto emitter = EmitterSpec::giant(-4.2, 0.1, Site{200, Leg::A}, 3);
  QuadratureOptions q;
  q.points = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(self_energy_quadrature(p, emitter, std::complex<double>(0.0, 0.05), q));
}
BENCHMARK(BM_SelfEnergyQuadrature)->Arg(2001)->Arg(20001)->Unit(benchmark::kMicrosecond);

void BM_BandMinima(benchmark::State& state) {
  const auto p = ladder(1000);
  for (auto _ : state) benchmark::DoNotOptimize(find_band_minima(p));
}
BENCHMARK(BM_BandMinima);

}  // namespace
BENCHMARK_MAIN();
