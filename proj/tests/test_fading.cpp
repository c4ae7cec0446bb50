#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "harq/fading.hpp"
#include "oracles.hpp"

using harq::e1;
using harq::exp_e1;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("e1 matches the defining integral") {
    // Frozen from the Romberg oracle over the defining integral.
    CHECK(e1(1.0) == doctest::Approx(0.2193839343955203).epsilon(1e-12));
    CHECK(e1(10.0) == doctest::Approx(4.156968929685324e-6).epsilon(1e-12));
    CHECK(oracle::e1(1.0) == doctest::Approx(0.2193839343955203).epsilon(1e-11));

    // 50 log-spaced points across [1e-6, 50].
    for (int i = 0; i < 50; ++i) {
        double x = std::pow(10.0, -6.0 + i * (std::log10(50.0) + 6.0) / 49.0);
        double want = oracle::e1(x);
        CHECK(std::abs(e1(x) - want) <= 1e-9 * want);
    }
}

TEST_CASE("e1 sandwich and monotonicity") {
    double prev = kInf;
    for (double x : {1e-4, 1e-2, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0}) {
        double v = e1(x);
        CHECK(v < std::exp(-x) / x);
        CHECK(v > std::exp(-x) / (x + 1.0));
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("e1 domain errors") {
    CHECK_THROWS_AS(e1(0.0), std::domain_error);
    CHECK_THROWS_AS(e1(-1.0), std::domain_error);
    CHECK_THROWS_AS(exp_e1(0.0), std::domain_error);
}

TEST_CASE("exp_e1 stays finite and accurate at large arguments") {
    CHECK(exp_e1(1.0) == doctest::Approx(0.5963473623231941).epsilon(1e-11));
    // Leading asymptotics 1/x (1 - 1/x + 2/x^2 ...) at x = 1e4.
    CHECK(exp_e1(1e4) == doctest::Approx(9.999000199940021e-5).epsilon(1e-6));
    CHECK(exp_e1(1e6) * 1e6 == doctest::Approx(1.0).epsilon(1e-5));
    // Consistency with e1 where both are representable.
    for (double x : {0.3, 1.0, 3.0, 20.0, 200.0}) {
        CHECK(exp_e1(x) == doctest::Approx(std::exp(x) * e1(x)).epsilon(1e-10));
    }
}

TEST_CASE("rayleigh model basics") {
    harq::FadingModel m = harq::rayleigh_model();
    CHECK(m.cdf(0.0) == 0.0);
    CHECK(m.cdf(-1.0) == 0.0);
    CHECK(m.cdf(kInf) == 1.0);
    CHECK(m.mean == 1.0);

    // Density integrates to one; mean equals one (quadrature check).
    double mass = oracle::romberg_halfline([&](double x) { return m.pdf(x); });
    double mean = oracle::romberg_halfline([&](double x) { return x * m.pdf(x); });
    CHECK(std::abs(mass - 1.0) <= 1e-9);
    CHECK(std::abs(mean - 1.0) <= 1e-9);

    // CDF non-decreasing on a sweep.
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
        double x = 0.05 * i;
        CHECK(m.cdf(x) >= prev);
        prev = m.cdf(x);
    }
}

TEST_CASE("rayleigh conditional mean") {
    harq::FadingModel m = harq::rayleigh_model();
    CHECK(m.conditional_mean(0.0, kInf) == doctest::Approx(1.0).epsilon(1e-12));
    // Frozen from the quadrature oracle int_0^1 x e^-x / int_0^1 e^-x.
    double want = oracle::romberg([](double x) { return x * std::exp(-x); }, 0.0, 1.0) /
                  oracle::romberg([](double x) { return std::exp(-x); }, 0.0, 1.0);
    CHECK(want == doctest::Approx(0.4180232931306736).epsilon(1e-11));
    CHECK(m.conditional_mean(0.0, 1.0) == doctest::Approx(0.4180232931306736).epsilon(1e-10));

    // Centroid containment on random-ish intervals.
    for (double a : {0.0, 0.2, 1.0, 3.0, 10.0}) {
        for (double gap : {1e-6, 0.5, 2.0, 50.0}) {
            double b = a + gap;
            double c = m.conditional_mean(a, b);
            CHECK(c >= a);
            CHECK(c <= b);
        }
        double c = m.conditional_mean(a, kInf);
        CHECK(c == doctest::Approx(a + 1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(m.conditional_mean(2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(m.conditional_mean(1.0, 1.0), std::domain_error);
}

TEST_CASE("tail_inverse_mean decreases to zero") {
    harq::FadingModel m = harq::rayleigh_model();
    double prev = kInf;
    for (double x : {0.01, 0.1, 1.0, 5.0, 20.0, 40.0}) {
        double v = m.tail_inverse_mean(x);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev <= 1e-17);
    CHECK(m.tail_inverse_mean(1.0) == doctest::Approx(e1(1.0)).epsilon(1e-14));
}

TEST_CASE("quantile inverts the cdf") {
    harq::FadingModel m = harq::rayleigh_model();
    for (double u : {0.0, 0.1, 0.5, 0.9, 0.999999}) {
        CHECK(m.cdf(m.quantile(u)) == doctest::Approx(u).epsilon(1e-12));
    }
    CHECK_THROWS_AS(m.quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(m.quantile(-0.1), std::domain_error);
}
