#include <benchmark/benchmark.h>

#include <limits>

#include "harq/simulate.hpp"

static void BM_Simulate(benchmark::State& state) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    harq::ThresholdPlan plan;
    plan.max_rounds = 2;
    plan.feedback_levels = 2;
    plan.rate = 1.0;
    plan.tau = {1.2, 0.9};
    plan.s = {{0.0, 1.0, kInf}, {0.0, 1.4, kInf}};
    auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(harq::simulate(harq::ProtocolKind::Rtd, plan, n, 7).eta());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Simulate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
