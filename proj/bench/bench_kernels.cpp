#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hvi/bo.hpp"
#include "hvi/distribution.hpp"
#include "hvi/mc_oracle.hpp"

namespace {

hvi::Execution mode(benchmark::State const& state)
{
    return state.range(1) == 0 ? hvi::Execution::Serial : hvi::Execution::Parallel;
}

void label(benchmark::State& state)
{
    state.SetLabel(state.range(1) == 0 ? "serial" : "parallel");
}

// pdf and cdf of the HVI law on a 256-point grid
void BM_EvaluateGrid(benchmark::State& state)
{
    auto const front = hvi::segment_front(static_cast<std::size_t>(state.range(0)), {1.0, 1.0}, 1);
    auto const d = hvi::HviDistribution::build(front, {0.4, 0.4, 0.1, 0.1});
    std::vector<double> grid(256);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid[k] = d.support_lo() + (d.support_hi() - d.support_lo()) * static_cast<double>(k) / 255.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(hvi::evaluate_grid(d, grid, mode(state)));
    }
    label(state);
}
BENCHMARK(BM_EvaluateGrid)->ArgsProduct({{10, 50, 100}, {0, 1}})->Unit(benchmark::kMillisecond);

// Monte-Carlo HVI samples by hypervolume recomputation
void BM_SampleHvi(benchmark::State& state)
{
    auto const front = hvi::segment_front(static_cast<std::size_t>(state.range(0)), {1.0, 1.0}, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hvi::sample_hvi(front, {0.4, 0.4, 0.1, 0.1}, {100000, 7}, mode(state)));
    }
    label(state);
}
BENCHMARK(BM_SampleHvi)->ArgsProduct({{10, 100}, {0, 1}})->Unit(benchmark::kMillisecond);

// acquisition screening plus refinement on a synthetic eps-PoHVI surface
void BM_MaximizeAcquisition(benchmark::State& state)
{
    auto const front = hvi::segment_front(20, {1.0, 1.0}, 2);
    auto const acq = hvi::Acquisition::make(hvi::AcquisitionKind::EpsPoHvi);
    hvi::ScoreFn const score = [&](std::span<double const> x) {
        double s = 0.0;
        for (double v : x) {
            s += v;
        }
        double const m = s / static_cast<double>(x.size());
        hvi::BiGaussian const p{m, 0.9 - m, 0.05 + 0.1 * x[0], 0.05 + 0.1 * x[1]};
        return acq(p, front, 10);
    };
    hvi::MaximizerSettings settings;
    settings.refine_evals = 50;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hvi::maximize_acquisition(score, 5, 0.0, 1.0, settings, 3, mode(state)));
    }
    label(state);
}
BENCHMARK(BM_MaximizeAcquisition)->ArgsProduct({{5}, {0, 1}})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
