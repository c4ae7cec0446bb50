#pragma once

#include <functional>

namespace harq {

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt, x > 0.
/// Series expansion below 1, continued fraction above; relative error <= 1e-10.
double e1(double x);

/// e^x * E1(x) without forming e^x. Usable for arbitrarily large x
/// (asymptotically ~ 1/x), needed by the low-SNR closed forms where
/// e^{1/P} alone would overflow.
double exp_e1(double x);

/**
 * Distribution of the per-slot fading power gain.
 *
 * All members are pure functions of their arguments; a FadingModel can be
 * shared freely across threads. The gain is normalized so that mean == 1.
 */
struct FadingModel {
    std::function<double(double)> cdf;                       // Pr[gamma <= x]
    std::function<double(double)> pdf;                       // density
    double mean = 1.0;                                       // must be 1
    std::function<double(double)> tail_inverse_mean;         // E[1/gamma * 1{gamma >= x}]
    std::function<double(double, double)> conditional_mean;  // E[gamma | a <= gamma < b]
    std::function<double(double)> quantile;                  // inverse cdf, u in [0,1)
};

/// Unit-mean exponential gain (Rayleigh amplitude fading): F(x) = 1 - e^{-x}.
FadingModel rayleigh_model();

}  // namespace harq
