#include "harq/dp.hpp"

#include "harq/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace harq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Decision per (slot, state, fading cell): target grid index, or:
constexpr int kActStop = -1;    // transmit nothing
constexpr int kActFinish = -2;  // spend exactly enough to decode now

struct DpModel {
    ProtocolKind kind;
    double theta;          // e^R - 1
    double rate;           // R
    double goal;           // g(R): RTD theta, INR R, ALO 1 (success count)
    std::vector<double> x;     // state grid, x[0]=0 .. x[N]=goal
    std::vector<double> gamma; // fading cell lower endpoints, prob 1/K each

    // Power to move the accumulated state from x to x' on gain gamma.
    double move_cost(double from, double to, double g) const {
        if (g <= 0.0) return kInf;
        switch (kind) {
            case ProtocolKind::Rtd: return (to - from) / g;
            case ProtocolKind::Inr: return (std::exp(to) - std::exp(from)) / (g * std::exp(from));
            case ProtocolKind::Alo: return theta / g;  // only finishing makes sense
        }
        return kInf;
    }
};

struct Policy {
    // decisions[m-1][cell * (N+1) + state] for RTD/INR; ALO uses state 0 only.
    std::vector<std::vector<int>> decisions;
};

struct Evaluation {
    double reward = 0.0;  // E[R * 1{decoded}]
    double power = 0.0;   // E[total transmit power per renewal]
    double slots = 0.0;   // E[T]
};

// Backward pass at prices (beta per slot, lambda per unit power); returns the
// greedy policy. The inner maximization over targets uses an upper convex
// hull over (phi(x'), continuation(x')) because the cost is linear in
// phi(x') at fixed (state, gain), with phi = identity (RTD) or exp (INR).
Policy backward(const DpModel& model, int max_rounds, double beta, double lambda) {
    const int n_states = static_cast<int>(model.x.size());  // N+1 points, x[N] = goal
    const int cells = static_cast<int>(model.gamma.size());
    Policy policy;
    policy.decisions.assign(max_rounds, {});

    if (model.kind == ProtocolKind::Alo) {
        // Single active state; value of being undecoded before slot m.
        double next_value = 0.0;  // after the last slot: packet over
        for (int m = max_rounds; m >= 1; --m) {
            policy.decisions[m - 1].assign(cells, kActStop);
            double v = 0.0;
            for (int c = 0; c < cells; ++c) {
                double skip = -beta + next_value;
                double g = model.gamma[c];
                double finish = g > 0.0 ? -beta - lambda * model.theta / g + model.rate : -kInf;
                if (finish > skip) {
                    policy.decisions[m - 1][c] = kActFinish;
                    v += finish;
                } else {
                    v += skip;
                }
            }
            next_value = v / cells;
        }
        return policy;
    }

    auto phi = [&](double xv) {
        return model.kind == ProtocolKind::Inr ? std::exp(xv) : xv;
    };

    std::vector<double> value_next(n_states, 0.0);  // V_{m+1}, zero after slot M
    std::vector<double> value_cur(n_states, 0.0);
    std::vector<double> hull_u, hull_v;  // upper hull of (phi(x'), continuation(x'))
    std::vector<int> hull_id;

    for (int m = max_rounds; m >= 1; --m) {
        auto& dec = policy.decisions[m - 1];
        dec.assign(static_cast<std::size_t>(cells) * n_states, kActStop);
        std::fill(value_cur.begin(), value_cur.end(), 0.0);

        for (int c = 0; c < cells; ++c) {
            double g = model.gamma[c];
            if (g <= 0.0) {
                for (int i = 0; i < n_states; ++i) {
                    value_cur[i] += -beta + (m < max_rounds ? value_next[i] : 0.0);
                }
                continue;
            }
            // Build the hull right-to-left so that at state i it contains
            // exactly the admissible targets x' >= x_i (including "finish").
            hull_u.clear();
            hull_v.clear();
            hull_id.clear();
            auto push_point = [&](double u, double v, int id) {
                // Upper hull over points (u, v) inserted with strictly
                // decreasing u; keeps exactly the maximizers of v - a*u, a > 0.
                while (hull_u.size() >= 2) {
                    std::size_t k = hull_u.size();
                    double us = hull_u[k - 2], vs = hull_v[k - 2];  // second-last
                    double ul = hull_u[k - 1], vl = hull_v[k - 1];  // last
                    // drop the last point when it lies on/below segment (us,vs)-(u,v)
                    double cross = (u - us) * (vl - vs) - (v - vs) * (ul - us);
                    if (cross >= 0.0) {
                        hull_u.pop_back();
                        hull_v.pop_back();
                        hull_id.pop_back();
                    } else {
                        break;
                    }
                }
                hull_u.push_back(u);
                hull_v.push_back(v);
                hull_id.push_back(id);
            };
            auto query = [&](double a) {
                // max over hull of v - a*u; hull ordered by decreasing u
                std::size_t lo = 0, hi = hull_u.size() - 1;
                while (lo < hi) {
                    std::size_t mid = (lo + hi) / 2;
                    double cur = hull_v[mid] - a * hull_u[mid];
                    double nxt = hull_v[mid + 1] - a * hull_u[mid + 1];
                    if (nxt >= cur) {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                return lo;
            };

            push_point(phi(model.goal), model.rate, n_states - 1);  // finish at the goal
            for (int i = n_states - 1; i >= 0; --i) {
                if (i < n_states - 1 && m < max_rounds) {
                    // x' = x_{i+1} .. only useful as a stepping stone
                    push_point(phi(model.x[i]), value_next[i], i);
                }
                double a = lambda / (model.kind == ProtocolKind::Inr ? g * std::exp(model.x[i])
                                                                     : g);
                double stay = m < max_rounds ? value_next[i] : 0.0;
                double best = stay;
                int best_act = kActStop;
                std::size_t at = query(a);
                double cand = hull_v[at] - a * (hull_u[at] - phi(model.x[i]));
                if (cand > best) {
                    best = cand;
                    best_act = hull_id[at] == n_states - 1 ? kActFinish : hull_id[at];
                }
                dec[static_cast<std::size_t>(c) * n_states + i] = best_act;
                value_cur[i] += -beta + best;
            }
        }
        for (int i = 0; i < n_states; ++i) value_next[i] = value_cur[i] / cells;
    }
    return policy;
}

Evaluation forward(const DpModel& model, int max_rounds, const Policy& policy) {
    const int cells = static_cast<int>(model.gamma.size());
    Evaluation ev;

    if (model.kind == ProtocolKind::Alo) {
        double active = 1.0;
        for (int m = 1; m <= max_rounds; ++m) {
            ev.slots += active;
            double decoded = 0.0;
            for (int c = 0; c < cells; ++c) {
                if (policy.decisions[m - 1][c] == kActFinish) {
                    ev.power += active / cells * model.theta / model.gamma[c];
                    decoded += active / cells;
                }
            }
            ev.reward += decoded * model.rate;
            active -= decoded;
        }
        return ev;
    }

    const int n_states = static_cast<int>(model.x.size());
    std::vector<double> mass(n_states, 0.0), mass_next(n_states, 0.0);
    mass[0] = 1.0;
    for (int m = 1; m <= max_rounds; ++m) {
        std::fill(mass_next.begin(), mass_next.end(), 0.0);
        double active = 0.0;
        for (double w : mass) active += w;
        if (active <= 0.0) break;
        ev.slots += active;
        for (int i = 0; i < n_states; ++i) {
            double w = mass[i] / cells;
            if (mass[i] <= 0.0) continue;
            for (int c = 0; c < cells; ++c) {
                int act = policy.decisions[m - 1][static_cast<std::size_t>(c) * n_states + i];
                if (act == kActStop) {
                    mass_next[i] += w;
                } else if (act == kActFinish) {
                    ev.power += w * model.move_cost(model.x[i], model.goal, model.gamma[c]);
                    ev.reward += w * model.rate;
                } else {
                    ev.power += w * model.move_cost(model.x[i], model.x[act], model.gamma[c]);
                    mass_next[act] += w;
                }
            }
        }
        mass.swap(mass_next);
    }
    return ev;
}

struct Solved {
    Evaluation ev;
    double beta = 0.0;
};

Solved dinkelbach(const DpModel& model, int max_rounds, double lambda) {
    Solved out;
    double beta = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
        Policy pol = backward(model, max_rounds, beta, lambda);
        Evaluation ev = forward(model, max_rounds, pol);
        double beta_new = ev.slots > 0.0 ? (ev.reward - lambda * ev.power) / ev.slots : 0.0;
        out.ev = ev;
        if (std::abs(beta_new - beta) <= 1e-12 * std::max(1.0, std::abs(beta))) {
            out.beta = beta_new;
            return out;
        }
        beta = beta_new;
    }
    out.beta = beta;
    return out;
}

double solve_eta(ProtocolKind kind, int max_rounds, double p_avg, double rate, int n_state,
                 int n_fade, double* power_out) {
    DpModel model;
    model.kind = kind;
    model.rate = rate;
    model.theta = std::expm1(rate);
    switch (kind) {
        case ProtocolKind::Alo: model.goal = 1.0; break;
        case ProtocolKind::Rtd: model.goal = model.theta; break;
        case ProtocolKind::Inr: model.goal = rate; break;
    }
    model.x.resize(kind == ProtocolKind::Alo ? 1 : n_state + 1);
    for (std::size_t i = 0; i < model.x.size(); ++i) {
        model.x[i] = model.goal * static_cast<double>(i) / n_state;
    }
    model.gamma.resize(n_fade);
    for (int k = 0; k < n_fade; ++k) {
        model.gamma[k] = -std::log1p(-static_cast<double>(k) / n_fade);
    }

    auto power_at = [&](double log_lam) {
        Solved s = dinkelbach(model, max_rounds, std::exp(log_lam));
        return s.ev.slots > 0.0 ? -s.ev.power / s.ev.slots : 0.0;
    };
    double log_lam =
        bisect_increasing(power_at, std::log(1e-10), std::log(1e10), -p_avg, 1e-11);

    // Evaluate on the feasible (power <= budget) side of the bracket.
    double lam = std::exp(log_lam);
    Solved s = dinkelbach(model, max_rounds, lam);
    for (int guard = 0; guard < 8 && s.ev.slots > 0.0 &&
                        s.ev.power / s.ev.slots > p_avg * (1.0 + 1e-9);
         ++guard) {
        lam *= 1.0 + 1e-6;
        s = dinkelbach(model, max_rounds, lam);
    }
    if (power_out) *power_out = s.ev.slots > 0.0 ? s.ev.power / s.ev.slots : 0.0;
    return s.ev.slots > 0.0 ? s.ev.reward / s.ev.slots : 0.0;
}

}  // namespace

DpResult dp_full_csi_throughput(ProtocolKind kind, int max_rounds, double p_avg,
                                double rate_nats, DpGrid grid) {
    if (max_rounds < 1 || max_rounds > 3) {
        throw std::domain_error("dp_full_csi_throughput: supports 1 <= M <= 3");
    }
    if (!(p_avg > 0.0)) throw std::domain_error("dp_full_csi_throughput: requires p_avg > 0");
    if (!(rate_nats > 0.0)) throw std::domain_error("dp_full_csi_throughput: requires rate > 0");
    if (grid.state_levels < 8 || grid.state_levels > 512 || grid.fading_levels < 8 ||
        grid.fading_levels > 512) {
        throw std::domain_error("dp_full_csi_throughput: grid levels must lie in [8, 512]");
    }

    DpResult out;
    out.eta = solve_eta(kind, max_rounds, p_avg, rate_nats, grid.state_levels,
                        grid.fading_levels, &out.mean_power);
    double eta_half = solve_eta(kind, max_rounds, p_avg, rate_nats,
                                std::max(8, grid.state_levels / 2),
                                std::max(8, grid.fading_levels / 2), nullptr);
    if (out.eta > 0.0 && std::abs(out.eta - eta_half) > 0.02 * out.eta) {
        out.converged = false;
        out.warning = "refinement delta above 2%: grid too coarse to bracket the value";
    }
    return out;
}

}  // namespace harq
