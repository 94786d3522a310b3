#include <benchmark/benchmark.h>

#include <omp.h>

#include "ttsv/experiment.hpp"
#include "ttsv/intensity.hpp"
#include "ttsv/sim.hpp"

using namespace ttsv;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.days = 16;
    c.window_days = 4;
    c.noises = {NoiseKind::none};
    c.rv_M = {26, 78};
    c.pavg_M = {390};
    return c;
}

void BM_DayLoopSerial(benchmark::State& state) {
    const ExperimentConfig c = small_config();
    for (auto _ : state) {
        auto r = run_experiment_serial(c);
        benchmark::DoNotOptimize(r.losses.data());
    }
}

void BM_DayLoopParallel(benchmark::State& state) {
    ExperimentConfig c = small_config();
    c.threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto r = run_experiment(c);
        benchmark::DoNotOptimize(r.losses.data());
    }
}

void BM_SimulateDay(benchmark::State& state) {
    const SimConfig c;
    std::uint64_t d = 0;
    for (auto _ : state) {
        auto p = simulate_day(c, d++);
        benchmark::DoNotOptimize(p.iv);
    }
}

void BM_KernelVarsigma2(benchmark::State& state) {
    const SimConfig c;
    const auto p = simulate_day(c, 0);
    const KernelSpec ks;
    for (auto _ : state) {
        auto v = estimate_varsigma2(p.ticks_clean, ks);
        benchmark::DoNotOptimize(v.values().data());
    }
}

}  // namespace

BENCHMARK(BM_DayLoopSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DayLoopParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateDay)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelVarsigma2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
