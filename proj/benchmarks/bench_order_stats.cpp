#include <benchmark/benchmark.h>

#include <vector>

#include "harq/order_stats.hpp"

static void BM_MaxSumCcdf(benchmark::State& state) {
    harq::MaxSumLaw law;
    law.max_coeff = 0.8;
    law.sum_coeff = 1.0;
    int k = static_cast<int>(state.range(0));
    for (int i = 0; i < k; ++i) law.means.push_back(0.5 + 0.3 * i);
    for (auto _ : state) {
        benchmark::DoNotOptimize(harq::maxsum_ccdf(law, 1.0));
    }
}
BENCHMARK(BM_MaxSumCcdf)->Arg(2)->Arg(4)->Arg(6);

static void BM_PmInrQuadrature(benchmark::State& state) {
    std::vector<double> taus(static_cast<std::size_t>(state.range(0)), 1.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(harq::pm_inr_quadrature(taus, 1.7));
    }
}
BENCHMARK(BM_PmInrQuadrature)->Arg(2)->Arg(3);

static void BM_PmInrBounds(benchmark::State& state) {
    std::vector<double> taus = {0.8, 1.3, 2.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(harq::pm_inr_bounds(taus, 1.7));
    }
}
BENCHMARK(BM_PmInrBounds);
