#include <benchmark/benchmark.h>

#include <vector>

#include "bumpforge/hammerstein.hpp"
#include "bumpforge/limit_bump.hpp"
#include "bumpforge/refinement.hpp"

using namespace bumpforge;

namespace {

LimitBump fhn() {
    const std::vector<double> guess{0.4};
    return solve_crossings(make_kernel(Exponential{1.339}), 0.2, 1, guess);
}

LimitBump two_bump() {
    const std::vector<double> guess{0.3, 0.8};
    return solve_crossings(make_kernel(DiffGaussians{3, 2, 1, 0.5}), 0.3, 2, guess);
}

void BM_ApplyHBeta(benchmark::State& state) {
    const LimitBump b = fhn();
    const int points = static_cast<int>(state.range(0));
    const GridFunction u = initial_state(b, default_grid(b, points)).U;
    const FiringRateModel f = make_firing_rate(FiringFamily::Hill, 100, 0.2);
    for (auto _ : state) benchmark::DoNotOptimize(apply_H_beta(u, b.kernel(), f));
    state.SetComplexityN(points);
}
BENCHMARK(BM_ApplyHBeta)->Arg(257)->Arg(513)->Arg(1025)->Complexity()->Unit(benchmark::kMillisecond);

void BM_SolveCrossings(benchmark::State& state) {
    const KernelModel w = make_kernel(DiffGaussians{3, 2, 1, 0.5});
    const std::vector<double> guess{0.3, 0.8};
    for (auto _ : state) benchmark::DoNotOptimize(solve_crossings(w, 0.3, 2, guess));
}
BENCHMARK(BM_SolveCrossings)->Unit(benchmark::kMicrosecond);

void BM_IterateOnce(benchmark::State& state) {
    const LimitBump b = two_bump();
    const RefinementConfig cfg{.grid = default_grid(b)};
    const CorrectionData c = build_correction(b);
    const FiringRateModel f = make_firing_rate(FiringFamily::Hill, 100, 0.3);
    const RefinementState s0 = initial_state(b, cfg.grid);
    for (auto _ : state) benchmark::DoNotOptimize(iterate_once(s0, b, c, f, cfg));
}
BENCHMARK(BM_IterateOnce)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
