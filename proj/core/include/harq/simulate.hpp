#pragma once

#include <cstdint>
#include <vector>

#include "harq/harq.hpp"

namespace harq {

/**
 * Counter-based splittable generator: output i of stream s is a pure hash of
 * (seed, s, i), so shards reproduce identically regardless of scheduling.
 */
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform draw in (0, 1]; never returns 0, safe under -log(u).
    double next_unit();

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

struct RenewalStats {
    std::uint64_t n_renewals = 0;
    double total_reward = 0.0;   // sum over renewals of R * 1{decoded}
    double total_cost = 0.0;     // sum of transmit power over all slots
    std::uint64_t total_slots = 0;
    double se_eta = 0.0;         // jackknife standard error of eta()
    double se_power = 0.0;       // jackknife standard error of mean_power()

    double eta() const { return total_slots ? total_reward / total_slots : 0.0; }
    double mean_power() const { return total_slots ? total_cost / total_slots : 0.0; }
};

/// Slot-level Monte Carlo of the closed-loop protocol with renewal-reward
/// accounting. Runs 64 independent shards (jackknife standard errors come
/// from them); bit-identical tallies for identical inputs.
RenewalStats simulate(ProtocolKind kind, const ThresholdPlan& plan, std::uint64_t n_renewals,
                      std::uint64_t seed);

struct PtildeEstimate {
    std::vector<std::vector<double>> p;   // same layout as ptilde_table
    std::vector<std::vector<double>> se;  // binomial standard errors
    std::uint64_t n_renewals = 0;
};

/// Empirical feedback-history frequencies {B_1=0,...,B_{m-1}=0, B_m <= f}
/// plus the outage row, counted across renewals.
PtildeEstimate empirical_ptilde(ProtocolKind kind, const ThresholdPlan& plan,
                                std::uint64_t n_renewals, std::uint64_t seed);

}  // namespace harq
