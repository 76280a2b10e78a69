// Serial reference vs OpenMP for the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "switchsync/experiments.hpp"
#include "switchsync/lmi.hpp"

namespace {

using namespace switchsync;

const GainCertificate& cert() {
    static const GainCertificate c = solve_feasibility(LmiProblem::for_alpha_range(0.0, 1.0));
    return c;
}

void BM_VerifySerial(benchmark::State& state) {
    const VertexSet v = polytope_vertices();
    for (auto _ : state) benchmark::DoNotOptimize(verify_certificate_serial(cert().p, cert().k, DistributionMatrix(), v));
}
BENCHMARK(BM_VerifySerial);

void BM_VerifyParallel(benchmark::State& state) {
    const VertexSet v = polytope_vertices();
    for (auto _ : state) benchmark::DoNotOptimize(verify_certificate(cert().p, cert().k, DistributionMatrix(), v));
}
BENCHMARK(BM_VerifyParallel);

void BM_AlphaGridSerial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(alpha_grid_margins_serial(cert().p, cert().k, DistributionMatrix(), 0.0, 1.0, n));
}
BENCHMARK(BM_AlphaGridSerial)->Arg(101)->Arg(1001)->Arg(10001);

void BM_AlphaGridParallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(alpha_grid_margins(cert().p, cert().k, DistributionMatrix(), 0.0, 1.0, n));
}
BENCHMARK(BM_AlphaGridParallel)->Arg(101)->Arg(1001)->Arg(10001);

std::vector<Scenario> seed_sweep(std::size_t n) {
    std::vector<Scenario> out;
    for (std::size_t s = 0; s < n; ++s) out.push_back(scenario_preset("random", s));
    return out;
}

void BM_BatchSerial(benchmark::State& state) {
    const auto batch = seed_sweep(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(batch, cert()));
}
BENCHMARK(BM_BatchSerial)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BatchParallel(benchmark::State& state) {
    const auto batch = seed_sweep(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(batch, cert()));
}
BENCHMARK(BM_BatchParallel)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
    const LmiProblem p = LmiProblem::for_alpha_range(0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_feasibility(p));
}
BENCHMARK(BM_Solve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
