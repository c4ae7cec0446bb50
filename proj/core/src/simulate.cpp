#include "harq/simulate.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <vector>

namespace harq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kShards = 64;

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct RenewalOutcome {
    int slots = 0;
    bool decoded = false;
    double cost = 0.0;
    std::vector<int> feedback_seq;  // B_1..B_T (generic) or per-slot fail flags (classical)
};

// One packet under the in-advance feedback protocol.
RenewalOutcome run_generic(ProtocolKind kind, const ThresholdPlan& plan, CounterRng& rng) {
    RenewalOutcome out;
    const double theta = plan.theta();
    std::vector<HistoryEntry> history;
    double snr_acc = 0.0;
    double mi_acc = 0.0;
    bool alo_any = false;
    for (int m = 1; m <= plan.max_rounds; ++m) {
        double gamma = -std::log(rng.next_unit());
        int b = feedback(kind, plan, m, gamma, history);
        double denom = b == 0 ? plan.tau[m - 1] : plan.s[m - 1][b];
        double power = denom == kInf ? 0.0 : theta / denom;
        out.cost += power;
        out.slots = m;
        out.feedback_seq.push_back(b);

        double received = gamma * power;
        snr_acc += received;
        mi_acc += std::log1p(received);
        alo_any = alo_any || received >= theta;

        bool success = false;
        switch (kind) {
            case ProtocolKind::Alo: success = alo_any; break;
            case ProtocolKind::Rtd: success = snr_acc >= theta; break;
            case ProtocolKind::Inr: success = mi_acc >= plan.rate; break;
        }
        if (b > 0 || m == plan.max_rounds) {
            out.decoded = success;
            return out;
        }
        history.push_back({gamma, plan.tau[m - 1]});
    }
    return out;
}

// Classical ACK/NACK: feedback at the end of the slot, so a decoded packet
// ends the renewal without a wasted slot.
RenewalOutcome run_classical(ProtocolKind kind, const ThresholdPlan& plan, CounterRng& rng) {
    RenewalOutcome out;
    const double theta = plan.theta();
    double snr_acc = 0.0;
    double mi_acc = 0.0;
    for (int m = 1; m <= plan.max_rounds; ++m) {
        double gamma = -std::log(rng.next_unit());
        double power = plan.tau[m - 1] == kInf ? 0.0 : theta / plan.tau[m - 1];
        out.cost += power;
        out.slots = m;

        double received = gamma * power;
        snr_acc += received;
        mi_acc += std::log1p(received);
        bool success = false;
        switch (kind) {
            case ProtocolKind::Alo: success = received >= theta; break;
            case ProtocolKind::Rtd: success = snr_acc >= theta; break;
            case ProtocolKind::Inr: success = mi_acc >= plan.rate; break;
        }
        out.feedback_seq.push_back(success ? 1 : 0);
        if (success) {
            out.decoded = true;
            return out;
        }
    }
    out.decoded = false;
    return out;
}

struct ShardTally {
    double reward = 0.0;
    double cost = 0.0;
    std::uint64_t slots = 0;
    std::uint64_t renewals = 0;
    std::vector<std::vector<std::uint64_t>> event_counts;  // ptilde events
};

ShardTally run_shard(ProtocolKind kind, const ThresholdPlan& plan, std::uint64_t n,
                     std::uint64_t seed, std::uint64_t shard, bool count_events) {
    ShardTally tally;
    const int m_rounds = plan.max_rounds;
    const int f_levels = plan.feedback_levels;
    if (count_events) {
        tally.event_counts.assign(m_rounds + 1, std::vector<std::uint64_t>(f_levels, 0));
    }
    CounterRng rng(seed, shard);
    const bool classical = plan.classical();
    for (std::uint64_t i = 0; i < n; ++i) {
        RenewalOutcome r = classical ? run_classical(kind, plan, rng)
                                     : run_generic(kind, plan, rng);
        tally.reward += r.decoded ? plan.rate : 0.0;
        tally.cost += r.cost;
        tally.slots += static_cast<std::uint64_t>(r.slots);
        tally.renewals += 1;
        if (!count_events) continue;

        if (classical) {
            // Row m: decoding still failed after m slots; top row: outage.
            int failed_through = 0;
            for (std::size_t m = 0; m < r.feedback_seq.size(); ++m) {
                if (r.feedback_seq[m] == 0) {
                    failed_through = static_cast<int>(m) + 1;
                } else {
                    break;
                }
            }
            for (int m = 1; m <= m_rounds; ++m) {
                bool fail_m = m <= failed_through;
                bool fail_prev = (m - 1) <= failed_through;
                if (fail_m) tally.event_counts[m - 1][0] += 1;
                for (int f = 1; f < f_levels; ++f) {
                    if (f == f_levels - 1 ? fail_prev : fail_m) {
                        tally.event_counts[m - 1][f] += 1;
                    }
                }
            }
            bool outage = !r.decoded;
            if (outage) tally.event_counts[m_rounds][0] += 1;
            for (int f = 1; f < f_levels; ++f) {
                bool prev = m_rounds - 1 <= failed_through;
                if (f == f_levels - 1 ? prev : outage) tally.event_counts[m_rounds][f] += 1;
            }
        } else {
            int zeros = 0;
            for (int b : r.feedback_seq) {
                if (b == 0) {
                    ++zeros;
                } else {
                    break;
                }
            }
            for (int m = 1; m <= m_rounds; ++m) {
                bool prior_zero = zeros >= m - 1 && static_cast<int>(r.feedback_seq.size()) >= m;
                if (!prior_zero) continue;
                int b_m = r.feedback_seq[m - 1];
                for (int f = 0; f < f_levels; ++f) {
                    if (b_m <= f) tally.event_counts[m - 1][f] += 1;
                }
            }
            bool outage = zeros == m_rounds && !r.decoded;
            if (outage) tally.event_counts[m_rounds][0] += 1;
            for (int f = 1; f < f_levels; ++f) {
                bool ev = f == f_levels - 1 ? zeros >= m_rounds : outage;
                if (ev) tally.event_counts[m_rounds][f] += 1;
            }
        }
    }
    return tally;
}

std::vector<ShardTally> run_all(ProtocolKind kind, const ThresholdPlan& plan,
                                std::uint64_t n_renewals, std::uint64_t seed,
                                bool count_events) {
    std::vector<std::uint64_t> shard_n(kShards, n_renewals / kShards);
    for (std::uint64_t i = 0; i < n_renewals % kShards; ++i) shard_n[i] += 1;
    std::vector<std::future<ShardTally>> futs;
    futs.reserve(kShards);
    for (int sh = 0; sh < kShards; ++sh) {
        futs.push_back(std::async(std::launch::async, run_shard, kind, std::cref(plan),
                                  shard_n[sh], seed, static_cast<std::uint64_t>(sh),
                                  count_events));
    }
    std::vector<ShardTally> out;
    out.reserve(kShards);
    for (auto& f : futs) out.push_back(f.get());
    return out;
}

double jackknife_se(const std::vector<double>& num, const std::vector<double>& den) {
    const int n = static_cast<int>(num.size());
    double num_tot = 0.0, den_tot = 0.0;
    for (int i = 0; i < n; ++i) {
        num_tot += num[i];
        den_tot += den[i];
    }
    std::vector<double> loo(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = den_tot - den[i];
        loo[i] = d > 0.0 ? (num_tot - num[i]) / d : 0.0;
        mean += loo[i];
    }
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += (loo[i] - mean) * (loo[i] - mean);
    return std::sqrt(var * (n - 1.0) / n);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
    key_ = splitmix(seed ^ splitmix(stream * 0xD1342543DE82EF95ULL + 0x6A09E667F3BCC909ULL));
}

std::uint64_t CounterRng::next_u64() {
    return splitmix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
}

double CounterRng::next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

RenewalStats simulate(ProtocolKind kind, const ThresholdPlan& plan, std::uint64_t n_renewals,
                      std::uint64_t seed) {
    plan.validate();
    if (n_renewals < 1) throw std::domain_error("simulate: needs n_renewals >= 1");
    auto tallies = run_all(kind, plan, n_renewals, seed, /*count_events=*/false);

    RenewalStats stats;
    std::vector<double> rewards, costs, slots;
    for (const auto& t : tallies) {
        stats.total_reward += t.reward;
        stats.total_cost += t.cost;
        stats.total_slots += t.slots;
        stats.n_renewals += t.renewals;
        rewards.push_back(t.reward);
        costs.push_back(t.cost);
        slots.push_back(static_cast<double>(t.slots));
    }
    stats.se_eta = jackknife_se(rewards, slots);
    stats.se_power = jackknife_se(costs, slots);
    return stats;
}

PtildeEstimate empirical_ptilde(ProtocolKind kind, const ThresholdPlan& plan,
                                std::uint64_t n_renewals, std::uint64_t seed) {
    plan.validate();
    if (n_renewals < 1) throw std::domain_error("empirical_ptilde: needs n_renewals >= 1");
    auto tallies = run_all(kind, plan, n_renewals, seed, /*count_events=*/true);

    PtildeEstimate est;
    est.n_renewals = n_renewals;
    const int rows = plan.max_rounds + 1;
    est.p.assign(rows, std::vector<double>(plan.feedback_levels, 0.0));
    est.se = est.p;
    for (int m = 0; m < rows; ++m) {
        for (int f = 0; f < plan.feedback_levels; ++f) {
            std::uint64_t c = 0;
            for (const auto& t : tallies) c += t.event_counts[m][f];
            double p = static_cast<double>(c) / static_cast<double>(n_renewals);
            est.p[m][f] = p;
            est.se[m][f] = std::sqrt(p * (1.0 - p) / static_cast<double>(n_renewals));
        }
    }
    return est;
}

}  // namespace harq
