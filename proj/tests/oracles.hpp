#pragma once

// Test-side reference computations. Deliberately independent of the library's
// integration and special-function paths: Romberg extrapolation here versus
// series/continued-fraction/adaptive-Simpson in the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

// Romberg integration of a smooth function on [a, b].
inline double romberg(const std::function<double(double)>& f, double a, double b,
                      int max_level = 20, double tol = 1e-13) {
    std::vector<std::vector<double>> r(1);
    double h = b - a;
    r[0].push_back(0.5 * h * (f(a) + f(b)));
    for (int k = 1; k <= max_level; ++k) {
        h *= 0.5;
        double sum = 0.0;
        std::int64_t points = std::int64_t(1) << (k - 1);
        for (std::int64_t i = 0; i < points; ++i) {
            sum += f(a + (2.0 * i + 1.0) * h);
        }
        r.emplace_back();
        r[k].push_back(0.5 * r[k - 1][0] + h * sum);
        double pow4 = 1.0;
        for (int j = 1; j <= k; ++j) {
            pow4 *= 4.0;
            r[k].push_back(r[k][j - 1] + (r[k][j - 1] - r[k - 1][j - 1]) / (pow4 - 1.0));
        }
        if (k > 3 && std::abs(r[k][k] - r[k - 1][k - 1]) <
                         tol * (std::abs(r[k][k]) + 1e-300)) {
            return r[k][k];
        }
    }
    return r.back().back();
}

// Integral over [0, inf) via the rational substitution s = u/(1-u).
inline double romberg_halfline(const std::function<double(double)>& f, double tol = 1e-13) {
    auto g = [&](double u) {
        if (u >= 1.0) return 0.0;
        double s = u / (1.0 - u);
        double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        double v = f(s) * jac;
        return std::isfinite(v) ? v : 0.0;
    };
    return romberg(g, 0.0, 1.0, 22, tol);
}

// E1(x) = int_x^inf e^-t / t dt computed from the defining integral.
inline double e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("oracle::e1 requires x > 0");
    return romberg_halfline([&](double s) { return std::exp(-(x + s)) / (x + s); });
}

// CDF of sum_k v_k Z_k (unit exponentials) by recursive convolution
// quadrature; exercise K <= 3 to keep runtime sane.
inline double hypoexp_cdf(const std::vector<double>& v, double x, std::size_t at = 0) {
    if (x <= 0.0) return 0.0;
    if (at + 1 == v.size()) return -std::expm1(-x / v[at]);
    auto f = [&](double t) {
        return std::exp(-t / v[at]) / v[at] * hypoexp_cdf(v, x - t, at + 1);
    };
    return romberg(f, 0.0, x, 16, 1e-10);
}

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Monte Carlo CCDF of a*max + b*sum of independent exponentials.
inline McEstimate mc_maxsum_ccdf(double a, double b, const std::vector<double>& means,
                                 double x, std::uint64_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(std::nextafter(0.0, 1.0), 1.0);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        double mx = 0.0, sm = 0.0;
        for (double mu : means) {
            double g = -mu * std::log(uni(rng));
            mx = std::max(mx, g);
            sm += g;
        }
        if (a * mx + b * sm > x) ++hits;
    }
    McEstimate est;
    est.value = static_cast<double>(hits) / static_cast<double>(n);
    est.se = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n));
    return est;
}

// Monte Carlo estimate of the INR failure probability
// Pr[sum log(1+theta*g_s/tau_s) < log(1+theta)].
inline McEstimate mc_pm_inr(const std::vector<double>& taus, double theta, std::uint64_t n,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(std::nextafter(0.0, 1.0), 1.0);
    std::uint64_t hits = 0;
    const double target = std::log1p(theta);
    for (std::uint64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (double tau : taus) {
            double g = -std::log(uni(rng));
            acc += std::log1p(theta * g / tau);
        }
        if (acc < target) ++hits;
    }
    McEstimate est;
    est.value = static_cast<double>(hits) / static_cast<double>(n);
    est.se = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n));
    return est;
}

}  // namespace oracle
