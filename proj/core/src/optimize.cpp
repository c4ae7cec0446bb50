#include "harq/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "harq/outage.hpp"

namespace harq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogRhoFloor = -40.0;  // 1/tau below e^-40 is an off round

// Coordinates: per round m, log(1/tau_m), then log s_{m,1} and log gaps up to
// s_{m,F-1}. All ordering constraints disappear in these coordinates.
std::vector<double> coords_from_plan(const ThresholdPlan& plan) {
    std::vector<double> z;
    z.reserve(static_cast<std::size_t>(plan.max_rounds) * plan.feedback_levels);
    for (int m = 0; m < plan.max_rounds; ++m) {
        double rho = plan.tau[m] == kInf ? 0.0 : 1.0 / plan.tau[m];
        z.push_back(rho > 0.0 ? std::max(std::log(rho), kLogRhoFloor) : kLogRhoFloor);
    }
    for (int m = 0; m < plan.max_rounds; ++m) {
        for (int f = 1; f < plan.feedback_levels; ++f) {
            double gap = plan.s[m][f] - plan.s[m][f - 1];
            z.push_back(std::log(std::max(gap, 1e-9)));
        }
    }
    return z;
}

ThresholdPlan plan_from_coords(ProtocolKind, int max_rounds, int f_levels,
                               std::span<const double> z) {
    ThresholdPlan plan;
    plan.max_rounds = max_rounds;
    plan.feedback_levels = f_levels;
    plan.tau.resize(max_rounds);
    plan.s.assign(max_rounds, std::vector<double>(f_levels + 1, 0.0));
    for (int m = 0; m < max_rounds; ++m) {
        double c = std::clamp(z[m], -300.0, 300.0);
        plan.tau[m] = std::exp(-c);
    }
    std::size_t at = static_cast<std::size_t>(max_rounds);
    for (int m = 0; m < max_rounds; ++m) {
        double run = 0.0;
        for (int f = 1; f < f_levels; ++f) {
            run += std::exp(std::clamp(z[at++], -300.0, 300.0));
            plan.s[m][f] = run;
        }
        plan.s[m][f_levels] = kInf;
    }
    return plan;
}

std::vector<double> repeated_row_coords(int max_rounds, int f_levels, double log_rho,
                                        const std::vector<double>& interior) {
    ThresholdPlan p;
    p.max_rounds = max_rounds;
    p.feedback_levels = f_levels;
    p.rate = 0.0;
    p.tau.assign(max_rounds, log_rho <= kLogRhoFloor ? kInf : std::exp(-log_rho));
    p.s.assign(max_rounds, std::vector<double>(f_levels + 1, 0.0));
    for (int m = 0; m < max_rounds; ++m) {
        for (int f = 1; f < f_levels; ++f) p.s[m][f] = interior[f - 1];
        p.s[m][f_levels] = kInf;
    }
    return coords_from_plan(p);
}

}  // namespace

OptimizedPlan optimize_plan(ProtocolKind kind, int max_rounds, int f_levels, double p_avg,
                            const SearchSpec& spec, const std::vector<ThresholdPlan>& warm_plans) {
    if (max_rounds < 1) throw std::domain_error("optimize_plan: M >= 1 required");
    if (max_rounds >= 2 && f_levels < 2) {
        throw std::domain_error("optimize_plan: retransmissions need at least 1 feedback bit");
    }
    if (!(p_avg > 0.0)) throw std::domain_error("optimize_plan: requires p_avg > 0");

    auto evaluate = [&](std::span<const double> z) {
        ThresholdPlan plan = plan_from_coords(kind, max_rounds, f_levels, z);
        try {
            return analytic_throughput(kind, plan, p_avg).eta;
        } catch (const std::exception&) {
            return -1e9;
        }
    };

    // Quantizer rows of the single-shot (M = 1) optimum; its wrap threshold
    // doubles as the natural retransmission scale.
    std::vector<double> one_shot_interior;
    double one_shot_wrap_logrho;
    if (f_levels == 2) {
        OutagePoint ob = outage_one_bit(p_avg);
        one_shot_interior = {ob.threshold};
        one_shot_wrap_logrho = kLogRhoFloor;  // reduced form has zero off-power
    } else {
        SearchSpec sub = default_search(8);
        sub.seed = spec.seed;
        OutagePartial op = outage_partial_csi(p_avg, f_levels, sub);
        one_shot_interior = op.quantizer.interior;
        one_shot_wrap_logrho =
            op.quantizer.wrap == kInf ? kLogRhoFloor : -std::log(op.quantizer.wrap);
    }
    // Gaps for the ladder coordinates.
    std::vector<double> interiors = one_shot_interior;

    std::vector<std::vector<double>> starts;
    for (const ThresholdPlan& warm : warm_plans) {
        if (warm.max_rounds == max_rounds && warm.feedback_levels == f_levels) {
            starts.push_back(coords_from_plan(warm));
        }
    }
    // Power-control-only shape (repeat the one-shot plan; retransmission off).
    starts.push_back(repeated_row_coords(max_rounds, f_levels, one_shot_wrap_logrho, interiors));
    // Repetition-leaning shape: tau at the one-shot threshold scale.
    double tau_guess = std::max(one_shot_interior.front(), 1e-3);
    starts.push_back(repeated_row_coords(max_rounds, f_levels, -std::log(tau_guess), interiors));
    // Classical-leaning shape: coarse quantizer high above the tau scale.
    {
        std::vector<double> high(interiors.size());
        for (std::size_t i = 0; i < high.size(); ++i) high[i] = interiors[i] + 8.0;
        starts.push_back(repeated_row_coords(max_rounds, f_levels, -std::log(tau_guess), high));
    }
    int base = static_cast<int>(starts.size());
    int restarts = std::max(spec.restarts, base);
    for (int k = base; k < restarts; ++k) {
        starts.push_back(jitter(starts[k % base], 0.8, spec.seed, static_cast<std::uint64_t>(k)));
    }

    SearchResult best = multi_start_max(evaluate, starts, 0.5, spec.tol, spec.max_iters);

    OptimizedPlan out;
    out.plan = plan_from_coords(kind, max_rounds, f_levels, best.x);
    out.report = analytic_throughput(kind, out.plan, p_avg);
    out.plan.rate = out.report.rate;
    return out;
}

OptimizedPlan optimize_classical_plan(ProtocolKind kind, int max_rounds, double p_avg,
                                      const SearchSpec& spec, bool equal_power) {
    if (!(p_avg > 0.0)) throw std::domain_error("optimize_classical_plan: requires p_avg > 0");
    const int dims = equal_power ? 1 : max_rounds;

    auto evaluate = [&](std::span<const double> z) {
        std::vector<double> taus(max_rounds);
        for (int m = 0; m < max_rounds; ++m) {
            taus[m] = std::exp(std::clamp(equal_power ? z[0] : z[m], -60.0, 60.0));
        }
        try {
            ThresholdPlan plan = classical_plan(max_rounds, taus, 0.0);
            return analytic_throughput(kind, plan, p_avg).eta;
        } catch (const std::exception&) {
            return -1e9;
        }
    };

    std::vector<std::vector<double>> starts;
    for (double t : {0.25, 1.0, 4.0}) {
        starts.push_back(std::vector<double>(dims, std::log(t)));
    }
    int base = static_cast<int>(starts.size());
    int restarts = std::max(spec.restarts, base);
    for (int k = base; k < restarts; ++k) {
        starts.push_back(jitter(starts[k % base], 0.8, spec.seed, static_cast<std::uint64_t>(k)));
    }
    SearchResult best = multi_start_max(evaluate, starts, 0.4, spec.tol, spec.max_iters);

    std::vector<double> taus(max_rounds);
    for (int m = 0; m < max_rounds; ++m) {
        taus[m] = std::exp(equal_power ? best.x[0] : best.x[m]);
    }
    OptimizedPlan out;
    out.plan = classical_plan(max_rounds, taus, 0.0);
    out.report = analytic_throughput(kind, out.plan, p_avg);
    out.plan.rate = out.report.rate;
    return out;
}

std::vector<SweepRow> sweep(ProtocolKind kind, int max_rounds, int f_levels,
                            const std::vector<double>& snr_grid_db, const SearchSpec& spec) {
    if (snr_grid_db.empty()) throw std::domain_error("sweep: empty SNR grid");
    std::vector<SweepRow> rows;
    std::vector<ThresholdPlan> warm;
    for (double snr_db : snr_grid_db) {
        double p_avg = std::pow(10.0, snr_db / 10.0);
        OptimizedPlan opt = optimize_plan(kind, max_rounds, f_levels, p_avg, spec, warm);
        SweepRow row;
        row.snr_db = snr_db;
        row.eta = opt.report.eta;
        row.ratio_full_csi = opt.report.eta / ergodic_full_csi(p_avg).eta;
        row.plan = opt.plan;
        row.report = opt.report;
        rows.push_back(row);
        warm = {opt.plan};
    }
    return rows;
}

}  // namespace harq
