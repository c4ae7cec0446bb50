#pragma once

#include <vector>

#include "harq/ergodic.hpp"
#include "harq/search.hpp"

namespace harq {

/**
 * Outage (M = 1) quantizer with the wrap convention: interior thresholds
 * s_1 <= ... <= s_{F-1} plus the wrap threshold s_0 = s_F >= s_{F-1}.
 * Feedback 0 covers both {gamma < s_1} (outage risk) and {gamma >= s_0};
 * the implied powers are P_f = (e^R - 1) / s_f.
 */
struct OutageQuantizer {
    std::vector<double> interior;  // s_1..s_{F-1}
    double wrap = 0.0;             // s_0 = s_F, may be +inf
    double rate = 0.0;             // nats

    void validate() const;
    std::vector<double> powers() const;  // P_0..P_{F-1}
    double outage_probability() const;   // Pr[gamma < s_1]
    double average_power() const;
};

struct OutagePoint {
    double eta = 0.0;
    double threshold = 0.0;
};

/// Constant power: max_s log(1 + p_avg * s) * e^{-s}.
OutagePoint outage_no_csi(double p_avg);

/// One feedback bit, reduced single-variable form:
/// max_s e^{-s} log(1 + p_avg * s * e^{s}).
OutagePoint outage_one_bit(double p_avg);

/// Truncated channel inversion: max_t e^{-t} log(1 + p_avg / E1(t)).
OutagePoint outage_full_csi(double p_avg);

struct OutagePartial {
    double eta = 0.0;
    OutageQuantizer quantizer;
};

/// F-level outage capacity with the free wrap threshold (quantization
/// regions may be unions of intervals). `warm_thresholds` optionally seeds
/// the search with a lower-F solution (interior thresholds then wrap).
OutagePartial outage_partial_csi(double p_avg, int f_levels,
                                 const SearchSpec& spec = default_search(16),
                                 const std::vector<double>& warm_thresholds = {});

/// Same problem with the wrap pinned at +inf (interval regions only).
OutagePartial outage_partial_csi_interval(double p_avg, int f_levels,
                                          const SearchSpec& spec = default_search(16));

struct OutageBoundPair {
    double lower = 0.0;  // eta_hat(F-1)
    double upper = 0.0;  // eta_hat(F)
    std::vector<double> thresholds;  // ladder achieving eta_hat(F)
    double geometric_eta = 0.0;      // geometric-ladder value (F >= 4 only)
    double geometric_xi = 0.0;       // its ratio, >= 1
};

/// The interval-ladder bound pair eta_hat(F-1) <= eta <= eta_hat(F), plus a
/// two-parameter geometric ladder s_f = s_1 xi^{f-1} for F >= 4.
OutageBoundPair outage_bound_pair(double p_avg, int f_levels,
                                  const SearchSpec& spec = default_search(16));

}  // namespace harq
