#pragma once

#include <string>

#include "harq/harq.hpp"

namespace harq {

struct DpGrid {
    int state_levels = 256;   // uniform on [0, g(R)], <= 512
    int fading_levels = 256;  // equal-probability quantile cells, <= 512
};

struct DpResult {
    double eta = 0.0;         // nats per channel use, a realizable lower bound
    double mean_power = 0.0;  // E[P]/E[T] of the returned policy
    bool converged = true;
    std::string warning;      // set when the grid looks too coarse
};

/**
 * Finite-horizon causal power control with perfect CSI at a fixed rate:
 * value iteration over the discretized accumulated state (SNR for RTD,
 * mutual information for INR, decode indicator for ALO) wrapped in a
 * Dinkelbach ratio iteration, with an outer bisection on the power price so
 * the long-term budget binds. Fading cells use their lower endpoint, so the
 * returned policy is realizable and eta is a true lower bound.
 */
DpResult dp_full_csi_throughput(ProtocolKind kind, int max_rounds, double p_avg,
                                double rate_nats, DpGrid grid = {});

}  // namespace harq
