#include "harq/harq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "harq/order_stats.hpp"
#include "harq/search.hpp"
#include "harq/simulate.hpp"
#include "quadrature.hpp"

namespace harq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGainCap = 60.0;  // exponential mass above is ~1e-26

double cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

// Per-kind accumulated receiver state over zero-feedback rounds. The scale
// factor xi is derived from it; adding a round updates it.
struct Accum {
    ProtocolKind kind;
    double theta;
    double value;  // RTD: 1 - sum gain/tau; INR: prod(1 + theta gain/tau); ALO: unused

    static Accum fresh(ProtocolKind kind, double theta) { return {kind, theta, 1.0}; }
    double xi() const {
        switch (kind) {
            case ProtocolKind::Alo:
                return 1.0;  // inside the zero-feedback domain every round failed
            case ProtocolKind::Rtd:
                return value;
            case ProtocolKind::Inr:
                return ((1.0 + theta) / value - 1.0) / theta;
        }
        return 1.0;
    }
    Accum with_round(double gain, double tau) const {
        Accum next = *this;
        double x = tau == kInf ? 0.0 : gain / tau;
        if (kind == ProtocolKind::Rtd) next.value = value - x;
        if (kind == ProtocolKind::Inr) next.value = value * (1.0 + theta * x);
        return next;
    }
};

// E[ prod_{t<m} 1{g_t < xi_t min(tau_t, s_{t,1})} * F(xi_m * limit) ] by
// nested quadrature over the zero-feedback gains. Depth m-1 <= 3.
class PtildeIntegrator {
public:
    PtildeIntegrator(ProtocolKind kind, const ThresholdPlan& plan, const FadingModel& model)
        : kind_(kind), plan_(plan), model_(model) {}

    double final_prob(int m, double limit) const {
        if (m <= 0) return 1.0;
        const int depth = m - 1;
        if (kind_ == ProtocolKind::Alo) {
            double p = 1.0;
            for (int t = 1; t <= depth; ++t) {
                p *= model_.cdf(std::min(plan_.tau[t - 1], plan_.s[t - 1][1]));
            }
            return p * tail_factor(1.0, limit);
        }
        return recurse(1, m, Accum::fresh(kind_, plan_.theta()), limit);
    }

private:
    double tail_factor(double xi, double limit) const {
        if (limit == kInf) return xi > 0.0 ? 1.0 : 0.0;
        return xi > 0.0 ? model_.cdf(xi * limit) : 0.0;
    }

    double recurse(int t, int m, Accum acc, double limit) const {
        if (t == m) return tail_factor(acc.xi(), limit);
        const int depth = m - 1;
        double cap = std::min(plan_.tau[t - 1], plan_.s[t - 1][1]);
        double upper = std::min(acc.xi() * cap, kGainCap);
        if (!(upper > 0.0)) return 0.0;
        auto f = [&](double g) {
            return model_.pdf(g) * recurse(t + 1, m, acc.with_round(g, plan_.tau[t - 1]), limit);
        };
        if (depth <= 2) {
            double tol = t == 1 ? 3e-8 : 3e-9;
            return detail::adaptive_simpson(f, 0.0, upper, tol);
        }
        return detail::gl48().integrate(f, 0.0, upper);
    }

    ProtocolKind kind_;
    const ThresholdPlan& plan_;
    const FadingModel& model_;
};

// Classical failure probability after m full-power rounds.
double classical_fail(ProtocolKind kind, const ThresholdPlan& plan, int m,
                      const PtildeOptions& opts) {
    std::span<const double> taus(plan.tau.data(), static_cast<std::size_t>(m));
    switch (kind) {
        case ProtocolKind::Alo:
            return pm_alo(taus);
        case ProtocolKind::Rtd:
            return pm_rtd(taus);
        case ProtocolKind::Inr:
            break;
    }
    int finite = 0;
    for (double tau : taus) finite += tau != kInf;
    if (finite <= 3) return pm_inr_quadrature(taus, plan.theta());
    if (opts.mc_renewals == 0) {
        throw std::domain_error(
            "ptilde_table: classical INR with more than 3 rounds has no analytic form; "
            "enable the Monte Carlo fallback (mc_renewals > 0)");
    }
    return 0.0;  // caller replaces the whole table by the MC estimate
}

struct Assembled {
    std::vector<std::vector<double>> table;
    double mean_renewal = 1.0;
    double p_out = 0.0;
    double power_sum = 0.0;  // sum of probability/threshold terms; E[P] = theta * power_sum
};

std::vector<std::vector<double>> build_table(ProtocolKind kind, const ThresholdPlan& plan,
                                             const PtildeOptions& opts) {
    const int m_rounds = plan.max_rounds;
    const int f_levels = plan.feedback_levels;
    std::vector<std::vector<double>> table(m_rounds + 1, std::vector<double>(f_levels, 0.0));

    if (plan.classical()) {
        bool need_mc = false;
        if (kind == ProtocolKind::Inr) {
            int finite = 0;
            for (double tau : plan.tau) finite += tau != kInf;
            need_mc = finite > 3;
        }
        if (need_mc) {
            if (opts.mc_renewals == 0) {
                classical_fail(kind, plan, m_rounds, opts);  // throws with the message
            }
            PtildeEstimate mc = empirical_ptilde(kind, plan, opts.mc_renewals, opts.seed);
            return mc.p;
        }
        std::vector<double> fail(m_rounds + 1);
        fail[0] = 1.0;
        for (int m = 1; m <= m_rounds; ++m) fail[m] = classical_fail(kind, plan, m, opts);
        for (int m = 1; m <= m_rounds; ++m) {
            table[m - 1][0] = fail[m];
            for (int f = 1; f < f_levels; ++f) {
                table[m - 1][f] = f == f_levels - 1 ? fail[m - 1] : fail[m];
            }
        }
        table[m_rounds][0] = fail[m_rounds];
        for (int f = 1; f < f_levels; ++f) {
            table[m_rounds][f] = f == f_levels - 1 ? fail[m_rounds - 1] : fail[m_rounds];
        }
        return table;
    }

    if (m_rounds > 3 && kind != ProtocolKind::Alo) {
        if (opts.mc_renewals == 0) {
            throw std::domain_error(
                "ptilde_table: RTD/INR with more than 3 rounds needs the Monte Carlo "
                "fallback (mc_renewals > 0)");
        }
        PtildeEstimate mc = empirical_ptilde(kind, plan, opts.mc_renewals, opts.seed);
        return mc.p;
    }

    static const FadingModel model = rayleigh_model();
    PtildeIntegrator integ(kind, plan, model);
    for (int m = 1; m <= m_rounds; ++m) {
        for (int f = 0; f <= f_levels - 2; ++f) {
            table[m - 1][f] = integ.final_prob(m, plan.s[m - 1][f + 1]);
        }
        // Pr[B_m <= F-1 | history all zero] is certain: reuse the m-1 row.
        table[m - 1][f_levels - 1] =
            m == 1 ? 1.0 : integ.final_prob(m - 1, plan.s[m - 2][1]);
    }
    table[m_rounds][0] = integ.final_prob(m_rounds + 1, kInf);
    for (int f = 1; f < f_levels; ++f) {
        table[m_rounds][f] =
            f == f_levels - 1 ? table[m_rounds - 1][0] : table[m_rounds][0];
    }
    return table;
}

Assembled assemble(ProtocolKind kind, const ThresholdPlan& plan, const PtildeOptions& opts) {
    Assembled out;
    out.table = build_table(kind, plan, opts);
    const int m_rounds = plan.max_rounds;
    const int f_levels = plan.feedback_levels;
    const bool classical = plan.classical();

    out.mean_renewal = 1.0;
    for (int m = 1; m <= m_rounds - 1; ++m) out.mean_renewal += out.table[m - 1][0];
    out.p_out = out.table[m_rounds][0];

    out.power_sum = 0.0;
    for (int m = 1; m <= m_rounds; ++m) {
        double zero_weight =
            classical ? (m == 1 ? 1.0 : out.table[m - 2][0]) : out.table[m - 1][0];
        out.power_sum += zero_weight / plan.tau[m - 1];
        for (int f = 1; f < f_levels; ++f) {
            double w = out.table[m - 1][f] - out.table[m - 1][f - 1];
            if (plan.s[m - 1][f] != kInf && w > 0.0) out.power_sum += w / plan.s[m - 1][f];
        }
    }
    return out;
}

}  // namespace

const char* to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::Alo: return "alo";
        case ProtocolKind::Rtd: return "rtd";
        case ProtocolKind::Inr: return "inr";
    }
    return "?";
}

void ThresholdPlan::validate() const {
    if (max_rounds < 1) throw std::domain_error("ThresholdPlan: M >= 1 required");
    if (feedback_levels < 1) throw std::domain_error("ThresholdPlan: F >= 1 required");
    if (max_rounds >= 2 && feedback_levels < 2) {
        throw std::domain_error("ThresholdPlan: retransmissions need at least 1 feedback bit");
    }
    if (!(rate >= 0.0)) throw std::domain_error("ThresholdPlan: rate must be >= 0");
    if (static_cast<int>(tau.size()) != max_rounds) {
        throw std::domain_error("ThresholdPlan: tau must have M entries");
    }
    for (double t : tau) {
        if (!(t > 0.0)) throw std::domain_error("ThresholdPlan: tau entries must be positive");
    }
    if (static_cast<int>(s.size()) != max_rounds) {
        throw std::domain_error("ThresholdPlan: s must have M rows");
    }
    for (const auto& row : s) {
        if (static_cast<int>(row.size()) != feedback_levels + 1) {
            throw std::domain_error("ThresholdPlan: each s row must have F+1 entries");
        }
        if (row.front() != 0.0 || row.back() != kInf) {
            throw std::domain_error("ThresholdPlan: s rows must run 0 .. +inf");
        }
        for (std::size_t f = 1; f < row.size(); ++f) {
            if (row[f] < row[f - 1]) {
                throw std::domain_error("ThresholdPlan: s rows must be non-decreasing");
            }
        }
    }
}

bool ThresholdPlan::classical() const {
    for (const auto& row : s) {
        for (std::size_t f = 1; f + 1 < row.size(); ++f) {
            if (row[f] != kInf) return false;
        }
    }
    return true;
}

double ThresholdPlan::theta() const { return std::expm1(rate); }

double scale_factor(ProtocolKind kind, std::span<const HistoryEntry> history, double rate) {
    if (history.empty()) return 1.0;
    switch (kind) {
        case ProtocolKind::Alo: {
            for (const auto& h : history) {
                if (h.gain >= h.threshold) return 0.0;
            }
            return 1.0;
        }
        case ProtocolKind::Rtd: {
            double acc = 0.0;
            for (const auto& h : history) {
                acc += h.threshold == kInf ? 0.0 : h.gain / h.threshold;
            }
            return 1.0 - acc;
        }
        case ProtocolKind::Inr: {
            double theta = std::expm1(rate);
            if (theta <= 0.0) return 1.0;
            double prod = 1.0;
            for (const auto& h : history) {
                prod *= 1.0 + (h.threshold == kInf ? 0.0 : theta * h.gain / h.threshold);
            }
            return ((1.0 + theta) / prod - 1.0) / theta;
        }
    }
    return 1.0;
}

int feedback(ProtocolKind kind, const ThresholdPlan& plan, int round, double gain,
             std::span<const HistoryEntry> history) {
    if (round < 1 || round > plan.max_rounds) {
        throw std::domain_error("feedback: round out of range");
    }
    double xi = scale_factor(kind, history, plan.rate);
    if (xi <= 0.0) return plan.feedback_levels - 1;
    double scaled = gain / xi;
    const auto& row = plan.s[round - 1];
    int b = 0;
    for (int f = plan.feedback_levels - 1; f >= 1; --f) {
        if (scaled >= row[f]) {
            b = f;
            break;
        }
    }
    return b;
}

std::vector<std::vector<double>> ptilde_table(ProtocolKind kind, const ThresholdPlan& plan,
                                              const PtildeOptions& opts) {
    plan.validate();
    return build_table(kind, plan, opts);
}

ThroughputReport analytic_throughput(ProtocolKind kind, const ThresholdPlan& plan, double p_avg,
                                     const PtildeOptions& opts) {
    plan.validate();
    if (!(p_avg > 0.0)) throw std::domain_error("analytic_throughput: requires p_avg > 0");

    ThresholdPlan work = plan;
    Assembled a;
    if (kind == ProtocolKind::Inr) {
        // The INR history probabilities depend on theta, so the power-budget
        // identity theta * W(theta) / E[T](theta) = p_avg is a fixed point.
        auto implied_power = [&](double log_theta) {
            work.rate = std::log1p(std::exp(log_theta));
            Assembled trial = assemble(kind, work, opts);
            return std::exp(log_theta) * trial.power_sum / trial.mean_renewal;
        };
        double log_theta = bisect_increasing(implied_power, std::log(1e-12), std::log(1e12),
                                             p_avg, 1e-12);
        work.rate = std::log1p(std::exp(log_theta));
        a = assemble(kind, work, opts);
    } else {
        work.rate = plan.rate > 0.0 ? plan.rate : 1.0;  // tables do not depend on it
        a = assemble(kind, work, opts);
        double theta = p_avg * a.mean_renewal / a.power_sum;
        work.rate = std::log1p(theta);
    }

    ThroughputReport report;
    report.rate = work.rate;
    report.ptilde = a.table;
    report.p_out = a.p_out;
    report.mean_renewal = a.mean_renewal;
    report.mean_power = work.theta() * a.power_sum / a.mean_renewal;
    report.eta = work.rate * (1.0 - a.p_out) / a.mean_renewal;
    return report;
}

ThresholdPlan classical_plan(int max_rounds, std::span<const double> taus, double rate) {
    if (max_rounds < 1) throw std::domain_error("classical_plan: M >= 1 required");
    if (static_cast<int>(taus.size()) != max_rounds) {
        throw std::domain_error("classical_plan: need one tau per round");
    }
    ThresholdPlan plan;
    plan.max_rounds = max_rounds;
    plan.feedback_levels = 2;
    plan.rate = rate;
    plan.tau.assign(taus.begin(), taus.end());
    plan.s.assign(max_rounds, {0.0, kInf, kInf});
    plan.validate();
    return plan;
}

}  // namespace harq
