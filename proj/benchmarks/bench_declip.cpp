#include <benchmark/benchmark.h>

#include "declip/experiments.hpp"
#include "declip/packing.hpp"
#include "declip/recovery.hpp"

using namespace declip;

namespace {

static void BM_SymEig(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = rng.normal();
            m(i, j) = v;
            m(j, i) = v;
        }
    for (auto _ : state) {
        benchmark::DoNotOptimize(sym_eig(m));
    }
}
BENCHMARK(BM_SymEig)->Arg(10)->Arg(30);

static void BM_FrameBounds(benchmark::State& state) {
    Rng rng(2);
    const Frame f = random_unit_frame(10, 30, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(frame_bounds(f));
    }
}
BENCHMARK(BM_FrameBounds);

static void BM_SaturatedRecovery50(benchmark::State& state) {
    Rng rng(3);
    const Frame f = random_unit_frame(10, 30, rng);
    const Vec x = normal_unit_vector(10, rng);
    const double lambda = 0.4;
    const Vec sat = saturate(analysis(f, x), lambda);
    const FrameBounds b = frame_bounds(f);
    const StepSchedule s = StepSchedule::constant(2.0 / (b.lower + b.upper), 2.0 / (b.lower + b.upper));
    for (auto _ : state) {
        benchmark::DoNotOptimize(saturated_frame_algorithm(f, sat, lambda, s, 50, x));
    }
}
BENCHMARK(BM_SaturatedRecovery50);

static void BM_RunTrial(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.lambda = 0.4;
    std::size_t idx = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trial(cfg, idx++ % 1000));
    }
}
BENCHMARK(BM_RunTrial);

static void BM_LambdaCEstimate(benchmark::State& state) {
    const Frame etf = simplex_etf(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        Rng rng(4);
        benchmark::DoNotOptimize(lambda_c_estimate(etf, 10, rng));
    }
}
BENCHMARK(BM_LambdaCEstimate)->Arg(3)->Arg(8);

static void BM_ArcSweep(benchmark::State& state) {
    Rng rng(5);
    const Frame f = random_unit_frame(2, static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(saturation_depth_n2(f, 0.7));
    }
}
BENCHMARK(BM_ArcSweep)->Arg(6)->Arg(30);

static void BM_StabilityEstimate(benchmark::State& state) {
    const Frame etf = simplex_etf(2);
    for (auto _ : state) {
        Rng rng(6);
        benchmark::DoNotOptimize(stability_estimate(etf, 0.95, 1.0, 1000, rng));
    }
}
BENCHMARK(BM_StabilityEstimate);

}  // namespace

BENCHMARK_MAIN();
