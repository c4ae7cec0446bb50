#include <benchmark/benchmark.h>

#include <limits>

#include "harq/harq.hpp"

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

harq::ThresholdPlan sample_plan() {
    harq::ThresholdPlan plan;
    plan.max_rounds = 2;
    plan.feedback_levels = 2;
    plan.rate = 1.0;
    plan.tau = {1.2, 0.9};
    plan.s = {{0.0, 1.0, kInf}, {0.0, 1.4, kInf}};
    return plan;
}
}  // namespace

static void BM_AnalyticThroughput(benchmark::State& state) {
    auto plan = sample_plan();
    auto kind = static_cast<harq::ProtocolKind>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(harq::analytic_throughput(kind, plan, 1.0).eta);
    }
}
BENCHMARK(BM_AnalyticThroughput)
    ->Arg(static_cast<int>(harq::ProtocolKind::Alo))
    ->Arg(static_cast<int>(harq::ProtocolKind::Rtd))
    ->Arg(static_cast<int>(harq::ProtocolKind::Inr));

static void BM_PtildeTable(benchmark::State& state) {
    auto plan = sample_plan();
    for (auto _ : state) {
        benchmark::DoNotOptimize(harq::ptilde_table(harq::ProtocolKind::Inr, plan));
    }
}
BENCHMARK(BM_PtildeTable);
