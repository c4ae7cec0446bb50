#pragma once

#include <vector>

#include "harq/search.hpp"

namespace harq {

inline SearchSpec default_search(int restarts) {
    SearchSpec s;
    s.restarts = restarts;
    return s;
}

/**
 * Quantized power controller for the ergodic (M = infinity, INR) problem:
 * power P_f on the region [s_f, s_{f+1}), thresholds tied to the powers by
 * the stationarity relation 1/s_f = d/(e^{lambda d} - 1) - P_{f-1} with
 * d = P_f - P_{f-1}, and lambda balancing the long-term power budget.
 */
struct ErgodicQuantizer {
    std::vector<double> powers;      // P_0..P_{F-1}, non-decreasing
    std::vector<double> thresholds;  // s_0=0, ..., s_F=+inf
    double lambda = 0.0;

    void validate(double p_avg) const;  // throws on any violated invariant
    double average_power() const;       // sum_f P_f Pr[R_f], Rayleigh
};

/// Constant-power ergodic rate E[log(1 + gamma * p_avg)] in nats
/// (= e^{1/p} E1(1/p) for Rayleigh).
double ergodic_no_csi(double p_avg);

struct FullCsiErgodic {
    double eta = 0.0;
    double lambda = 0.0;
};

/// Water-filling ergodic capacity: eta = E1(lambda) with
/// p_avg = e^{-lambda}/lambda - E1(lambda), solved by bisection.
FullCsiErgodic ergodic_full_csi(double p_avg);

struct PartialCsiErgodic {
    double eta = 0.0;
    ErgodicQuantizer quantizer;
};

/// Ergodic capacity with an F-level quantized-CSI power controller,
/// maximized by multi-start direct search over the power vector.
PartialCsiErgodic ergodic_partial_csi(double p_avg, int f_levels,
                                      const SearchSpec& spec = default_search(8));

struct ErgodicBounds {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> thresholds;        // of the centroid (upper) bound
    std::vector<double> lower_thresholds;  // of the left-endpoint bound
};

/// Jensen/centroid upper bound and left-endpoint lower bound with
/// water-filled powers, tightened by Lloyd-style alternation until the
/// thresholds move by less than 1e-8.
ErgodicBounds ergodic_bounds_lloyd(double p_avg, int f_levels);

}  // namespace harq
