#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "harq/fading.hpp"

namespace harq {

enum class ProtocolKind { Alo, Rtd, Inr };

const char* to_string(ProtocolKind kind);

/**
 * Full parameterization of the feedback/power protocol: rate R (nats),
 * per-round retransmission scales tau_m and quantizer rows
 * 0 = s[m][0] <= s[m][1] <= ... <= s[m][F] = +inf.
 *
 * A plan whose interior thresholds are all +inf carries no channel-state
 * information; the feedback degenerates to end-of-slot ACK/NACK and the
 * accounting follows the classical HARQ renewal formulas.
 */
struct ThresholdPlan {
    int max_rounds = 1;      // M
    int feedback_levels = 2; // F
    double rate = 0.0;       // nats per channel use
    std::vector<double> tau;
    std::vector<std::vector<double>> s;

    void validate() const;   // throws std::domain_error
    bool classical() const;
    double theta() const;    // e^R - 1
};

/// One already-transmitted zero-feedback round: the realized gain and the
/// threshold whose power theta/threshold was used.
struct HistoryEntry {
    double gain = 0.0;
    double threshold = 0.0;
};

struct ThroughputReport {
    double eta = 0.0;           // nats per channel use
    double p_out = 0.0;
    double mean_renewal = 1.0;  // E[T], slots
    double mean_power = 0.0;    // E[P]/E[T]
    double rate = 0.0;          // R implied by the power budget
    std::vector<std::vector<double>> ptilde;  // rows m=1..M+1, cols f=0..F-1
};

/// xi_m for the protocol: 1 on an empty history; ALO = product of past
/// decode-failure indicators, RTD = 1 - sum gain/threshold, INR = remaining
/// mutual-information deficit mapped back to a gain scale.
double scale_factor(ProtocolKind kind, std::span<const HistoryEntry> history, double rate);

/// Feedback symbol B_m in {0..F-1}: quantizer index of gain/xi_m, or F-1
/// when xi_m <= 0 (the receiver already has enough to decode).
int feedback(ProtocolKind kind, const ThresholdPlan& plan, int round, double gain,
             std::span<const HistoryEntry> history);

struct PtildeOptions {
    std::uint64_t mc_renewals = 0;  // 0 = analytic only; else Monte Carlo fallback
    std::uint64_t seed = 1;
};

/// Joint feedback-history probabilities ptilde_{m,f}; the last row holds the
/// outage probability in column 0. Analytic for M <= 3 (nested quadrature for
/// RTD/INR); beyond that a Monte Carlo fallback must be enabled explicitly.
std::vector<std::vector<double>> ptilde_table(ProtocolKind kind, const ThresholdPlan& plan,
                                              const PtildeOptions& opts = {});

/// Renewal-reward throughput of the plan with the rate eliminated through the
/// average-power identity: the returned report meets the budget exactly and
/// carries the implied rate.
ThroughputReport analytic_throughput(ProtocolKind kind, const ThresholdPlan& plan, double p_avg,
                                     const PtildeOptions& opts = {});

/// ACK/NACK-only plan: every interior threshold at +inf, power theta/tau_m on
/// round m.
ThresholdPlan classical_plan(int max_rounds, std::span<const double> taus, double rate);

}  // namespace harq
