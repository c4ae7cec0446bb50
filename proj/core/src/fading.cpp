#include "harq/fading.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace harq {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Power series: E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!).
double e1_series(double x) {
    double sum = -kEulerGamma - std::log(x);
    double term = 1.0;  // x^k / k!
    for (int k = 1; k <= 64; ++k) {
        term *= x / k;
        double add = (k % 2 ? term : -term) / k;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// Modified Lentz evaluation of the continued fraction
//   e^x E1(x) = 1 / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...))).
double exp_e1_cf(double x) {
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h;
}

}  // namespace

double e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("e1: requires x > 0");
    if (x == kInf) return 0.0;
    if (x <= 1.0) return e1_series(x);
    return std::exp(-x) * exp_e1_cf(x);
}

double exp_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_e1: requires x > 0");
    if (x == kInf) return 0.0;
    if (x <= 1.0) return std::exp(x) * e1_series(x);
    return exp_e1_cf(x);
}

FadingModel rayleigh_model() {
    FadingModel m;
    m.mean = 1.0;
    m.cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
    m.pdf = [](double x) { return x < 0.0 ? 0.0 : std::exp(-x); };
    m.tail_inverse_mean = [](double x) { return e1(x); };
    m.conditional_mean = [](double a, double b) {
        if (!(a >= 0.0) || !(a < b)) {
            throw std::domain_error("conditional_mean: requires 0 <= a < b");
        }
        // E[g | a<=g<b] = (e^{-a}(1+a) - e^{-b}(1+b)) / (e^{-a} - e^{-b})
        auto numer_term = [](double x) {
            return x == kInf ? 0.0 : std::exp(-x) * (1.0 + x);
        };
        double ea = std::exp(-a);
        double eb = b == kInf ? 0.0 : std::exp(-b);
        double denom = ea - eb;
        if (denom <= 1e-12 * ea || denom <= 0.0) {
            // Vanishing interval mass; the exact tail mean is a+1 when b = inf.
            return b == kInf ? a + 1.0 : 0.5 * (a + b);
        }
        return (numer_term(a) - numer_term(b)) / denom;
    };
    m.quantile = [](double u) {
        if (!(u >= 0.0) || !(u < 1.0)) {
            throw std::domain_error("quantile: requires u in [0,1)");
        }
        return -std::log1p(-u);
    };
    return m;
}

}  // namespace harq
