#include "harq/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "quadrature.hpp"

namespace harq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMergeRelTol = 1e-7;  // coefficients closer than this share a root

// Erlang(j) complementary CDF at y: e^{-y} * sum_{t<j} y^t/t!.
double erlang_ccdf(int j, double y) {
    if (y <= 0.0) return 1.0;
    double term = std::exp(-y);
    double acc = term;
    for (int t = 1; t < j; ++t) {
        term *= y / t;
        acc += term;
    }
    return acc;
}

// CCDF of sum_k v_k Z_k, Z iid unit exponentials, all v_k > 0.
// Repeated (merged) coefficients are expanded through the derivatives of the
// remaining factor at the shared pole, which is the analytic limit of the
// distinct-coefficient partial fractions.
double hypoexp_ccdf(std::vector<double> v, double x) {
    if (v.empty()) return x > 0.0 ? 0.0 : 1.0;
    if (x <= 0.0) return 1.0;
    std::sort(v.begin(), v.end(), std::greater<double>());

    std::vector<double> w;   // group representatives
    std::vector<int> r;      // multiplicities
    for (double value : v) {
        if (!w.empty() && (w.back() - value) <= kMergeRelTol * w.back()) {
            // running mean of the merged group
            w.back() = (w.back() * r.back() + value) / (r.back() + 1);
            ++r.back();
        } else {
            w.push_back(value);
            r.push_back(1);
        }
    }

    const int groups = static_cast<int>(w.size());
    long double total = 0.0L;
    for (int i = 0; i < groups; ++i) {
        // g(s) = prod_{k!=i} (1+s w_k)^{-r_k} expanded at s = -1/w_i.
        // Log-magnitude plus sign keeps the near-cancelling factors tame.
        double log_mag = 0.0;
        double sign = 1.0;
        for (int k = 0; k < groups; ++k) {
            if (k == i) continue;
            double f = 1.0 - w[k] / w[i];
            log_mag -= r[k] * std::log(std::abs(f));
            if (f < 0.0 && (r[k] % 2)) sign = -sign;
        }
        const int ri = r[i];
        std::vector<long double> g(ri, 0.0L);
        g[0] = static_cast<long double>(sign) * std::exp(static_cast<long double>(log_mag));
        if (ri > 1) {
            // h^{(n)} at the pole; q_k = w_i w_k / (w_i - w_k).
            std::vector<long double> h(ri, 0.0L);
            for (int n = 1; n < ri; ++n) {
                long double s = 0.0L;
                for (int k = 0; k < groups; ++k) {
                    if (k == i) continue;
                    long double q = static_cast<long double>(w[i]) * w[k] / (w[i] - w[k]);
                    long double qn = 1.0L;
                    for (int t = 0; t < n; ++t) qn *= q;
                    s += static_cast<long double>(r[k]) * qn;
                }
                long double fact = 1.0L;
                for (int t = 2; t < n; ++t) fact *= t;
                h[n] = ((n % 2) ? -1.0L : 1.0L) * fact * s;
            }
            for (int t = 1; t < ri; ++t) {
                long double acc = 0.0L;
                long double binom = 1.0L;
                for (int j = 0; j < t; ++j) {
                    acc += binom * g[j] * h[t - j];
                    binom = binom * (t - 1 - j) / (j + 1);
                }
                g[t] = acc;
            }
        }
        // c_{i, ri - t} = g^{ (t) } / (t! w_i^t); pair with Erlang CCDFs.
        long double t_fact = 1.0L;
        long double wi_pow = 1.0L;
        for (int t = 0; t < ri; ++t) {
            if (t > 0) {
                t_fact *= t;
                wi_pow *= w[i];
            }
            long double c = g[t] / (t_fact * wi_pow);
            total += c * static_cast<long double>(erlang_ccdf(ri - t, x / w[i]));
        }
    }
    double out = static_cast<double>(total);
    return std::clamp(out, 0.0, 1.0);
}

}  // namespace

void MaxSumLaw::validate() const {
    if (means.empty()) throw std::domain_error("MaxSumLaw: needs at least one mean");
    if (means.size() > 8) {
        throw std::domain_error("MaxSumLaw: K > 8 unsupported (K! permutation blowup)");
    }
    for (double mu : means) {
        if (!(mu > 0.0) || mu == kInf) {
            throw std::domain_error("MaxSumLaw: means must be positive and finite");
        }
    }
    if (!(sum_coeff > 0.0) || !(max_coeff + sum_coeff > 0.0)) {
        throw std::domain_error("MaxSumLaw: requires b > 0 and a + b > 0");
    }
}

double maxsum_ccdf(const MaxSumLaw& law, double x) {
    law.validate();
    if (x <= 0.0) return 1.0;
    const int k_count = static_cast<int>(law.means.size());
    const double a = law.max_coeff;
    const double b = law.sum_coeff;

    double lo = *std::min_element(law.means.begin(), law.means.end());
    double hi = *std::max_element(law.means.begin(), law.means.end());
    if (hi - lo <= 1e-12 * hi) {
        // Exchangeable case: every ordering contributes identically.
        std::vector<double> v(k_count);
        double inv_sum = 0.0;
        for (int l = 1; l <= k_count; ++l) {
            inv_sum += 1.0 / law.means[l - 1];
            v[l - 1] = (a + b * l) / inv_sum;
        }
        return hypoexp_ccdf(std::move(v), x);
    }

    std::vector<int> idx(k_count);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end());
    long double total = 0.0L;
    std::vector<double> v(k_count);
    do {
        double inv_sum = 0.0;
        double log_prob = 0.0;  // log Pr[ordering]
        for (int l = 1; l <= k_count; ++l) {
            double mu = law.means[idx[l - 1]];
            inv_sum += 1.0 / mu;
            v[l - 1] = (a + b * l) / inv_sum;
            log_prob -= std::log(mu * inv_sum);
        }
        total += std::exp(static_cast<long double>(log_prob)) *
                 static_cast<long double>(hypoexp_ccdf(v, x));
    } while (std::next_permutation(idx.begin(), idx.end()));
    return std::clamp(static_cast<double>(total), 0.0, 1.0);
}

double pm_rtd(std::span<const double> taus) {
    MaxSumLaw law;
    law.max_coeff = 0.0;
    law.sum_coeff = 1.0;
    for (double tau : taus) {
        if (!(tau > 0.0)) throw std::domain_error("pm_rtd: thresholds must be positive");
        if (tau == kInf) continue;  // gamma/inf contributes nothing
        law.means.push_back(1.0 / tau);
    }
    if (law.means.empty()) return 1.0;
    return 1.0 - maxsum_ccdf(law, 1.0);
}

double pm_alo(std::span<const double> taus) {
    double p = 1.0;
    for (double tau : taus) {
        if (!(tau > 0.0)) throw std::domain_error("pm_alo: thresholds must be positive");
        p *= tau == kInf ? 1.0 : -std::expm1(-tau);
    }
    return p;
}

std::pair<double, double> pm_inr_bounds(std::span<const double> taus, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("pm_inr_bounds: requires theta > 0");
    std::vector<double> finite;
    for (double tau : taus) {
        if (!(tau > 0.0)) throw std::domain_error("pm_inr_bounds: thresholds must be positive");
        if (tau != kInf) finite.push_back(tau);
    }
    const int m = static_cast<int>(finite.size());
    if (m == 0) return {1.0, 1.0};

    MaxSumLaw law;
    law.means.resize(m);
    for (int i = 0; i < m; ++i) law.means[i] = 1.0 / finite[i];

    // Inner region: (1+theta) * sum - theta * max < 1.
    law.max_coeff = -theta;
    law.sum_coeff = 1.0 + theta;
    double lower = 1.0 - maxsum_ccdf(law, 1.0);

    // Outer region: sum + (theta/((1+theta)^{1/m} - 1) - m) * max < 1.
    double root = std::expm1(std::log1p(theta) / m);
    law.max_coeff = theta / root - m;
    law.sum_coeff = 1.0;
    double upper = 1.0 - maxsum_ccdf(law, 1.0);
    return {lower, upper};
}

double pm_inr_quadrature(std::span<const double> taus, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("pm_inr_quadrature: requires theta > 0");
    std::vector<double> t;
    for (double tau : taus) {
        if (!(tau > 0.0)) throw std::domain_error("pm_inr_quadrature: thresholds must be positive");
        if (tau != kInf) t.push_back(tau);
    }
    const int m = static_cast<int>(t.size());
    if (m > 3) {
        throw std::domain_error(
            "pm_inr_quadrature: more than 3 finite thresholds unsupported; "
            "use pm_inr_bounds or the simulator");
    }
    auto cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
    if (m == 0) return 1.0;
    if (m == 1) return cdf(t[0]);
    if (m == 2) {
        auto f = [&](double g1) {
            double x1 = g1 / t[0];
            double lim = t[1] * (1.0 - x1) / (1.0 + theta * x1);
            return std::exp(-g1) * cdf(lim);
        };
        return detail::adaptive_simpson(f, 0.0, t[0], 3e-8);
    }
    auto outer = [&](double g1) {
        double x1 = g1 / t[0];
        double budget1 = (1.0 + theta) / (1.0 + theta * x1);  // remaining product budget
        double lim2 = t[1] * (budget1 - 1.0) / theta;
        auto inner = [&](double g2) {
            double x2 = g2 / t[1];
            double lim3 = t[2] * (budget1 / (1.0 + theta * x2) - 1.0) / theta;
            return std::exp(-g2) * cdf(lim3);
        };
        return std::exp(-g1) * detail::adaptive_simpson(inner, 0.0, lim2, 3e-9);
    };
    return detail::adaptive_simpson(outer, 0.0, t[0], 3e-8);
}

}  // namespace harq
