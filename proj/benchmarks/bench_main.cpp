#include <billiard/dynamics.hpp>
#include <billiard/fitting.hpp>
#include <billiard/periodic_orbits.hpp>
#include <billiard/rigidity.hpp>

#include <benchmark/benchmark.h>

using namespace billiard;

namespace {

DeformedCurve bumpy() {
    return DeformedCurve(EllipseSpec(Vec2(0.1, 0.0), 1.4, 0.8, 0.3),
                         DeformationFn(kTwoPi * std::cbrt(1.4 * 0.8), 0.0, {0.0, 0.0, 0.01}, {0.0, 0.0, 0.0, 0.0, 0.005}));
}

void BM_BilliardStep(benchmark::State& state) {
    const DeformedCurve c = bumpy();
    const PhasePoint p{0.1, 0.1 + 0.3 * c.period()};
    for (auto _ : state) benchmark::DoNotOptimize(billiard_step(c, p));
}
BENCHMARK(BM_BilliardStep);

void BM_SolveChain(benchmark::State& state) {
    const DeformedCurve c = bumpy();
    const int q = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_chain(c, q, 0.3));
}
BENCHMARK(BM_SolveChain)->Arg(3)->Arg(7)->Arg(16)->Arg(64);

void BM_FindPeriodicOrbit(benchmark::State& state) {
    const DeformedCurve c = bumpy();
    const int q = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(find_periodic_orbit(c, q, 0.0));
}
BENCHMARK(BM_FindPeriodicOrbit)->Arg(3)->Arg(7)->Arg(16);

void BM_Reexpress(benchmark::State& state) {
    const DeformedCurve c = bumpy();
    const EllipseSpec target(Vec2(0.11, 0.01), 1.41, 0.79, 0.31);
    for (auto _ : state) benchmark::DoNotOptimize(reexpress(c, target, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Reexpress)->Arg(16)->Arg(64);

void BM_Witness(benchmark::State& state) {
    const DeformedCurve c = bumpy();
    for (auto _ : state) benchmark::DoNotOptimize(integrability_witness(c, 5, 64, 1e-9));
}
BENCHMARK(BM_Witness);

} // namespace
BENCHMARK_MAIN();
