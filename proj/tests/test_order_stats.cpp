#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "harq/order_stats.hpp"
#include "oracles.hpp"

using harq::MaxSumLaw;
using harq::maxsum_ccdf;
using harq::pm_alo;
using harq::pm_inr_bounds;
using harq::pm_inr_quadrature;
using harq::pm_rtd;

namespace {
MaxSumLaw law_of(double a, double b, std::vector<double> means) {
    MaxSumLaw law;
    law.max_coeff = a;
    law.sum_coeff = b;
    law.means = std::move(means);
    return law;
}
}  // namespace

TEST_CASE("maxsum basic shapes") {
    MaxSumLaw law = law_of(0.0, 1.0, {1.0});
    CHECK(maxsum_ccdf(law, -1.0) == 1.0);
    CHECK(maxsum_ccdf(law, 0.0) == 1.0);
    CHECK(maxsum_ccdf(law, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    // Non-increasing in x, values in [0,1].
    MaxSumLaw law2 = law_of(1.0, 1.0, {1.0, 0.5, 2.0});
    double prev = 1.0;
    for (int i = 0; i <= 60; ++i) {
        double v = maxsum_ccdf(law2, 0.25 * i);
        CHECK(v <= prev + 1e-12);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("maxsum permutation symmetry") {
    std::vector<double> means = {0.4, 1.3, 2.2};
    MaxSumLaw a = law_of(0.7, 1.1, means);
    MaxSumLaw b = law_of(0.7, 1.1, {2.2, 0.4, 1.3});
    for (double x : {0.3, 1.0, 2.5, 7.0}) {
        CHECK(maxsum_ccdf(a, x) == doctest::Approx(maxsum_ccdf(b, x)).epsilon(1e-12));
    }
}

TEST_CASE("maxsum K=2 closed form, equal means") {
    // (a+b) max + b min = v1 Z1 + v2 Z2 with v1 = a+b, v2 = (a+2b)/2.
    double a = 1.0, b = 1.0;
    MaxSumLaw law = law_of(a, b, {1.0, 1.0});
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        double tau = 1.0 / (a + b);
        double c = (a + b) / (a + 2.0 * b);
        double want = std::exp(-x * tau) * 2.0 * c / (2.0 * c - 1.0) -
                      std::exp(-2.0 * c * tau * x) / (2.0 * c - 1.0);
        CHECK(maxsum_ccdf(law, x) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("maxsum against sampling at a quantile point") {
    MaxSumLaw law = law_of(1.0, 1.0, {1.0, 1.0});
    auto mc = oracle::mc_maxsum_ccdf(1.0, 1.0, {1.0, 1.0}, 1.0, 2'000'000, 17);
    CHECK(std::abs(maxsum_ccdf(law, 1.0) - mc.value) <= 4.0 * mc.se);
}

TEST_CASE("maxsum equal-means limit continuity") {
    for (double x : {0.5, 1.5, 4.0}) {
        double merged = maxsum_ccdf(law_of(0.0, 1.0, {1.0, 1.0}), x);
        double nearby = maxsum_ccdf(law_of(0.0, 1.0, {1.0, 1.0 + 1e-9}), x);
        CHECK(std::abs(merged - nearby) <= 1e-6);
        double merged2 = maxsum_ccdf(law_of(0.8, 1.0, {0.7, 0.7, 1.9}), x);
        double nearby2 = maxsum_ccdf(law_of(0.8, 1.0, {0.7, 0.7 * (1.0 + 1e-9), 1.9}), x);
        CHECK(std::abs(merged2 - nearby2) <= 1e-6);
    }
}

TEST_CASE("maxsum validation") {
    CHECK_THROWS_AS(maxsum_ccdf(law_of(0.0, 1.0, {}), 1.0), std::domain_error);
    CHECK_THROWS_AS(maxsum_ccdf(law_of(0.0, 1.0, std::vector<double>(9, 1.0)), 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(maxsum_ccdf(law_of(0.0, 1.0, {1.0, -2.0}), 1.0), std::domain_error);
    CHECK_THROWS_AS(maxsum_ccdf(law_of(-2.0, 1.0, {1.0}), 1.0), std::domain_error);
    CHECK_THROWS_AS(maxsum_ccdf(law_of(0.0, -1.0, {1.0}), 1.0), std::domain_error);
}

TEST_CASE("hypoexponential route agrees with convolution quadrature") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(0.2, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        int k = 2 + (trial % 2);
        std::vector<double> means(k);
        for (double& m : means) m = uni(rng);
        double x = uni(rng);
        // a=0: plain sum of exponentials with means mu_k.
        double got = 1.0 - maxsum_ccdf(law_of(0.0, 1.0, means), x);
        double want = oracle::hypoexp_cdf(means, x);
        CHECK(std::abs(got - want) <= 1e-6);
    }
}

TEST_CASE("pm_rtd closed forms") {
    CHECK(pm_rtd(std::array{1.0}) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    // Frozen from the partial-fraction form 1 - 2e^-1 + e^-2.
    CHECK(pm_rtd(std::array{1.0, 2.0}) == doctest::Approx(0.3995764008937280).epsilon(1e-10));
    // Equal thresholds: Erlang(2) CDF at 1, i.e. 1 - 2e^-1.
    CHECK(pm_rtd(std::array{1.0, 1.0}) == doctest::Approx(0.2642411176571153).epsilon(1e-10));
    // Infinite threshold contributes nothing.
    double inf = std::numeric_limits<double>::infinity();
    CHECK(pm_rtd(std::array{1.0, inf}) ==
          doctest::Approx(pm_rtd(std::array{1.0})).epsilon(1e-12));
}

TEST_CASE("pm_alo closed forms and domination") {
    CHECK(pm_alo(std::array{1.0}) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(pm_alo(std::array{1.0, 2.0}) == doctest::Approx(0.5465723439598089).epsilon(1e-12));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.1, 4.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> taus(2 + trial % 3);
        for (double& t : taus) t = uni(rng);
        CHECK(pm_alo(taus) >= pm_rtd(taus));
    }
}

TEST_CASE("pm_inr bounds collapse as theta -> 0") {
    std::vector<double> taus = {0.8, 1.7, 1.1};
    auto [lo, hi] = pm_inr_bounds(taus, 1e-9);
    double rtd = pm_rtd(taus);
    CHECK(std::abs(lo - rtd) <= 1e-6);
    CHECK(std::abs(hi - rtd) <= 1e-6);
}

TEST_CASE("pm_inr sandwich and chain") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni_tau(0.3, 3.0);
    std::uniform_real_distribution<double> uni_th(0.2, 6.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> taus = {uni_tau(rng), uni_tau(rng)};
        double theta = uni_th(rng);
        auto [lo, hi] = pm_inr_bounds(taus, theta);
        double mid = pm_inr_quadrature(taus, theta);
        double rtd = pm_rtd(taus);
        double alo = pm_alo(taus);
        CHECK(lo <= mid);
        CHECK(mid <= hi);
        CHECK(hi <= rtd);
        CHECK(rtd <= alo);
    }
}

TEST_CASE("pm_inr quadrature special cases") {
    // One slot: the condition reduces to gamma < tau for any theta.
    for (double theta : {0.1, 1.0, 20.0}) {
        CHECK(pm_inr_quadrature(std::array{1.3}, theta) ==
              doctest::Approx(1.0 - std::exp(-1.3)).epsilon(1e-10));
    }
    // Two slots against sampling.
    std::vector<double> taus = {1.0, 1.0};
    double theta = std::exp(1.0) - 1.0;
    auto mc = oracle::mc_pm_inr(taus, theta, 2'000'000, 11);
    CHECK(std::abs(pm_inr_quadrature(taus, theta) - mc.value) <= 4.0 * mc.se);
    // Three slots against sampling.
    std::vector<double> taus3 = {0.7, 1.2, 2.1};
    auto mc3 = oracle::mc_pm_inr(taus3, 1.5, 2'000'000, 12);
    CHECK(std::abs(pm_inr_quadrature(taus3, 1.5) - mc3.value) <= 4.0 * mc3.se);

    CHECK_THROWS_AS(pm_inr_quadrature(std::vector<double>(4, 1.0), 1.0), std::domain_error);
}
