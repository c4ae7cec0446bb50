#pragma once

#include <vector>

#include "harq/ergodic.hpp"
#include "harq/harq.hpp"
#include "harq/search.hpp"

namespace harq {

struct OptimizedPlan {
    ThresholdPlan plan;
    ThroughputReport report;
};

/// Maximize the analytic throughput over the plan's thresholds (tau's and
/// quantizer rows) at a given average SNR. Ordering constraints are removed
/// by searching over log gaps; `warm_plans` seed additional restarts.
OptimizedPlan optimize_plan(ProtocolKind kind, int max_rounds, int f_levels, double p_avg,
                            const SearchSpec& spec = default_search(16),
                            const std::vector<ThresholdPlan>& warm_plans = {});

/// Classical (ACK/NACK-only) plan optimization over the per-round powers;
/// `equal_power` restricts to tau_1 = ... = tau_M.
OptimizedPlan optimize_classical_plan(ProtocolKind kind, int max_rounds, double p_avg,
                                      const SearchSpec& spec = default_search(12),
                                      bool equal_power = false);

struct SweepRow {
    double snr_db = 0.0;
    double eta = 0.0;                 // nats
    double ratio_full_csi = 0.0;      // eta / ergodic water-filling capacity
    ThresholdPlan plan;
    ThroughputReport report;
};

/// Optimize the plan across an SNR grid, warm-starting each point from the
/// previous optimum; ratios are against ergodic_full_csi at the same SNR.
std::vector<SweepRow> sweep(ProtocolKind kind, int max_rounds, int f_levels,
                            const std::vector<double>& snr_grid_db,
                            const SearchSpec& spec = default_search(16));

}  // namespace harq
