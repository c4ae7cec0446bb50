#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "harq/ergodic.hpp"
#include "harq/fading.hpp"
#include "harq/outage.hpp"

using harq::ergodic_full_csi;
using harq::outage_bound_pair;
using harq::outage_full_csi;
using harq::outage_no_csi;
using harq::outage_one_bit;
using harq::outage_partial_csi;
using harq::outage_partial_csi_interval;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
double db(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

// Dense-grid maximization oracle on s in [0, 20].
double grid_max(const std::function<double(double)>& f) {
    double best = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        best = std::max(best, f(20.0 * i / 100000.0));
    }
    return best;
}
}  // namespace

TEST_CASE("outage_no_csi against a dense grid") {
    double p = 1.0;
    double want = grid_max([&](double s) { return std::log1p(p * s) * std::exp(-s); });
    CHECK(outage_no_csi(p).eta == doctest::Approx(want).epsilon(1e-6));

    // Small-power expansion: optimum near s=1, eta ~ p s* e^{-s*}.
    auto low = outage_no_csi(1e-5);
    CHECK(low.threshold == doctest::Approx(1.0).epsilon(2e-2));
    CHECK(low.eta / (1e-5 * low.threshold * std::exp(-low.threshold)) ==
          doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("outage_full_csi against a dense grid and the corollary chain") {
    double p = 1.0;
    double want =
        grid_max([&](double t) { return t <= 0.0 ? 0.0 : std::exp(-t) * std::log1p(p / harq::e1(t)); });
    CHECK(outage_full_csi(p).eta == doctest::Approx(want).epsilon(1e-6));

    for (double snr_db : {-25.0, -10.0, 0.0, 5.0}) {
        double pa = db(snr_db);
        double full = outage_full_csi(pa).eta;
        CHECK(full <= ergodic_full_csi(pa).eta);
        for (int f : {2, 4}) {
            CHECK(outage_partial_csi(pa, f).eta <= full * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("one bit of feedback beats no CSI and hits the paper ratios") {
    for (double snr_db : {-25.0, -10.0, 0.0, 5.0, 15.0}) {
        double p = db(snr_db);
        CHECK(outage_one_bit(p).eta > outage_no_csi(p).eta);
    }
    CHECK(outage_one_bit(db(-25.0)).eta / ergodic_full_csi(db(-25.0)).eta ==
          doctest::Approx(0.81).epsilon(0.04));
    CHECK(outage_one_bit(db(5.0)).eta / ergodic_full_csi(db(5.0)).eta ==
          doctest::Approx(0.73).epsilon(0.05));
    CHECK(outage_no_csi(db(-25.0)).eta / ergodic_full_csi(db(-25.0)).eta ==
          doctest::Approx(0.10).epsilon(0.25));
}

TEST_CASE("outage_partial_csi F=2 equals the reduced one-bit form at low and mid SNR") {
    for (double snr_db : {-25.0, 5.0}) {
        double p = db(snr_db);
        double reduced = outage_one_bit(p).eta;
        double full = outage_partial_csi(p, 2).eta;
        CHECK(std::abs(full - reduced) <= 1e-6 * std::max(1.0, reduced));
    }
}

TEST_CASE("outage_partial_csi structural invariants") {
    double p = db(-10.0);
    auto sol = outage_partial_csi(p, 3);
    sol.quantizer.validate();
    // Budget is active: theta * D = p_avg by construction of the rate.
    CHECK(sol.quantizer.average_power() == doctest::Approx(p).epsilon(1e-6));
    // Outage probability is exactly the cdf at s_1.
    CHECK(sol.quantizer.outage_probability() ==
          doctest::Approx(-std::expm1(-sol.quantizer.interior.front())).epsilon(1e-12));
    // Free wrap at least matches the interval-constrained search.
    double interval = outage_partial_csi_interval(p, 3).eta;
    CHECK(sol.eta >= interval * (1.0 - 1e-9));
}

TEST_CASE("outage_partial_csi monotone in F and convergent to full CSI") {
    double p = db(-10.0);
    double prev = outage_no_csi(p).eta;
    std::vector<double> warm;
    for (int f : {2, 4, 8}) {
        auto sol = outage_partial_csi(p, f, harq::default_search(16), warm);
        CHECK(sol.eta >= prev * (1.0 - 1e-9));
        prev = sol.eta;
        warm = sol.quantizer.interior;
        warm.push_back(sol.quantizer.wrap);
    }
    double p0 = db(0.0);
    auto sol32 = outage_partial_csi(p0, 32);
    CHECK(sol32.eta >= 0.99 * outage_full_csi(p0).eta);
}

TEST_CASE("bound pair sandwiches and geometric ladder") {
    double p = db(0.0);
    auto pair3 = outage_bound_pair(p, 3);
    double exact3 = outage_partial_csi(p, 3).eta;
    CHECK(pair3.lower <= exact3 * (1.0 + 1e-9));
    CHECK(exact3 <= pair3.upper * (1.0 + 1e-9));

    double pm10 = db(-10.0);
    auto pair4 = outage_bound_pair(pm10, 4);
    CHECK(pair4.geometric_xi >= 1.0);
    CHECK(pair4.geometric_eta <= pair4.upper * (1.0 + 1e-9));
    CHECK(pair4.geometric_eta >= 0.98 * pair4.upper);
}
