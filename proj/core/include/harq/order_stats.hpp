#pragma once

#include <span>
#include <utility>
#include <vector>

namespace harq {

/**
 * Law of X = a * max_k g_k + b * sum_k g_k for independent exponential g_k
 * with means mu_k. Restricted to b > 0, a + b > 0, where every mixture
 * coefficient of the order-statistics decomposition is positive and X >= 0.
 */
struct MaxSumLaw {
    double max_coeff = 0.0;      // a
    double sum_coeff = 1.0;      // b
    std::vector<double> means;   // mu_1..mu_K, all > 0, K <= 8

    void validate() const;  // throws std::domain_error
};

/// Pr[X > x]. Exact mixture-of-exponentials expression summed over all K!
/// orderings; coefficients that coincide within 1e-7 relative are merged and
/// handled through the analytic repeated-root limit.
double maxsum_ccdf(const MaxSumLaw& law, double x);

/// Pr[sum_s gamma_s / tau_s < 1], gamma iid unit-mean exponential.
/// Entries with tau = +inf contribute nothing and are dropped.
double pm_rtd(std::span<const double> taus);

/// Pr[gamma_s < tau_s for every s] = prod_s (1 - e^{-tau_s}).
double pm_alo(std::span<const double> taus);

/// Piecewise-linear inner/outer bounds on the incremental-redundancy failure
/// probability Pr[sum_s log(1 + theta * gamma_s / tau_s) < log(1 + theta)].
/// Returns {lower, upper}.
std::pair<double, double> pm_inr_bounds(std::span<const double> taus, double theta);

/// Exact-to-tolerance (1e-7 absolute) evaluation of the same probability by
/// nested adaptive quadrature. Supports at most 3 finite thresholds.
double pm_inr_quadrature(std::span<const double> taus, double theta);

}  // namespace harq
