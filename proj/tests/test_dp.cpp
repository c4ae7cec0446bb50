#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "harq/dp.hpp"
#include "harq/optimize.hpp"
#include "harq/outage.hpp"

using harq::dp_full_csi_throughput;
using harq::DpGrid;
using harq::ProtocolKind;

namespace {
double db(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

// The rate that the truncated-inversion optimum at this SNR would use.
double full_csi_rate(double p_avg) {
    auto full = harq::outage_full_csi(p_avg);
    return full.eta / std::exp(-full.threshold);
}
}  // namespace

TEST_CASE("single-shot DP reproduces truncated channel inversion") {
    double p = db(0.0);
    double rate = full_csi_rate(p);
    for (auto kind : {ProtocolKind::Rtd, ProtocolKind::Inr, ProtocolKind::Alo}) {
        auto dp = dp_full_csi_throughput(kind, 1, p, rate, DpGrid{512, 512});
        double want = harq::outage_full_csi(p).eta;
        CHECK(dp.eta >= want * 0.98);
        CHECK(dp.eta <= want * (1.0 + 1e-6));
        CHECK(dp.mean_power <= p * (1.0 + 1e-6));
    }
}

TEST_CASE("grid refinement never loses value") {
    double p = db(0.0);
    double rate = full_csi_rate(p);
    double prev = 0.0;
    for (int levels : {128, 256, 512}) {
        auto dp = dp_full_csi_throughput(ProtocolKind::Rtd, 1, p, rate,
                                         DpGrid{levels, levels});
        CHECK(dp.eta >= prev - 1e-4);
        prev = dp.eta;
    }
    // Same check through the M=2 backward pass.
    prev = 0.0;
    for (int levels : {64, 128, 256}) {
        auto dp = dp_full_csi_throughput(ProtocolKind::Rtd, 2, p, rate,
                                         DpGrid{levels, levels});
        CHECK(dp.eta >= prev - 1e-4);
        prev = dp.eta;
    }
}

TEST_CASE("perfect CSI dominates the best quantized plan") {
    double p = db(0.0);
    auto plan8 = harq::optimize_plan(ProtocolKind::Rtd, 2, 8, p, harq::default_search(8));
    auto dp = dp_full_csi_throughput(ProtocolKind::Rtd, 2, p, plan8.report.rate,
                                     DpGrid{192, 192});
    CHECK(dp.eta >= plan8.report.eta * (1.0 - 0.01));
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(dp_full_csi_throughput(ProtocolKind::Rtd, 4, 1.0, 1.0, DpGrid{}),
                    std::domain_error);
    CHECK_THROWS_AS(dp_full_csi_throughput(ProtocolKind::Rtd, 1, 1.0, 1.0, DpGrid{4, 4}),
                    std::domain_error);
    CHECK_THROWS_AS(dp_full_csi_throughput(ProtocolKind::Rtd, 1, -1.0, 1.0, DpGrid{}),
                    std::domain_error);
}
