#include "harq/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "harq/fading.hpp"

namespace harq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLambdaLo = 1e-12;
constexpr double kLambdaHi = 1e6;

// int_a^b log(1 + P x) e^{-x} dx, written with exp_e1 so that small P
// (huge 1/P) cannot overflow.
double region_rate(double p, double a, double b) {
    if (!(p > 0.0) || !(b > a)) return 0.0;
    auto endpoint = [&](double x) {
        if (x == kInf) return 0.0;
        return (std::log1p(p * x) + exp_e1(1.0 / p + x)) * std::exp(-x);
    };
    return endpoint(a) - endpoint(b);
}

// Thresholds from the power vector at a given multiplier (interior ones from
// the stationarity relation; non-physical values collapse to +inf).
std::vector<double> thresholds_from_powers(const std::vector<double>& p, double lambda) {
    const int f_levels = static_cast<int>(p.size());
    std::vector<double> s(f_levels + 1);
    s[0] = 0.0;
    for (int f = 1; f < f_levels; ++f) {
        double d = p[f] - p[f - 1];
        double base;
        if (d > 1e-14 * std::max(1.0, p[f])) {
            double e = std::expm1(lambda * d);
            base = e == kInf ? 0.0 : d / e;
        } else {
            base = 1.0 / lambda;
        }
        double inv = base - p[f - 1];
        double raw = inv > 0.0 ? 1.0 / inv : kInf;
        s[f] = std::max(raw, s[f - 1]);
    }
    s[f_levels] = kInf;
    return s;
}

double average_power_for(const std::vector<double>& p, const std::vector<double>& s) {
    double acc = 0.0;
    for (std::size_t f = 0; f < p.size(); ++f) {
        double mass = std::exp(-s[f]) - (s[f + 1] == kInf ? 0.0 : std::exp(-s[f + 1]));
        acc += p[f] * mass;
    }
    return acc;
}

// Budget-balancing multiplier for a fixed power vector; avg power decreases
// from P_{F-1} (lambda -> 0) to P_0 (lambda -> inf).
double solve_lambda(const std::vector<double>& p, double p_avg, bool* feasible) {
    *feasible = p.front() <= p_avg && p.back() >= p_avg;
    auto neg_power_at = [&](double log_lam) {
        double lam = std::exp(log_lam);
        return -average_power_for(p, thresholds_from_powers(p, lam));
    };
    double log_lam = bisect_increasing(neg_power_at, std::log(kLambdaLo), std::log(kLambdaHi),
                                       -p_avg, 1e-13);
    return std::exp(log_lam);
}

double objective_eta(const std::vector<double>& p, const std::vector<double>& s) {
    double acc = 0.0;
    for (std::size_t f = 0; f < p.size(); ++f) acc += region_rate(p[f], s[f], s[f + 1]);
    return acc;
}

std::vector<double> powers_from_coords(std::span<const double> z) {
    std::vector<double> p(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        double inc = std::exp(std::clamp(z[i], -300.0, 300.0));
        p[i] = i == 0 ? inc : p[i - 1] + inc;
    }
    return p;
}

// Discrete water-filling over (gain, probability) cells, budget met with
// equality when any positive-gain cell has mass.
std::vector<double> waterfill(const std::vector<double>& gain, const std::vector<double>& prob,
                              double p_avg, double* nu_out) {
    double positive_mass = 0.0;
    for (std::size_t i = 0; i < gain.size(); ++i) {
        if (gain[i] > 0.0 && prob[i] > 0.0) positive_mass += prob[i];
    }
    std::vector<double> p(gain.size(), 0.0);
    if (positive_mass <= 0.0) {
        if (nu_out) *nu_out = kInf;
        return p;
    }
    auto avg_at = [&](double log_nu) {
        double nu = std::exp(log_nu);
        double acc = 0.0;
        for (std::size_t i = 0; i < gain.size(); ++i) {
            if (gain[i] > 0.0) acc += std::max(0.0, 1.0 / nu - 1.0 / gain[i]) * prob[i];
        }
        return -acc;
    };
    double log_nu = bisect_increasing(avg_at, std::log(1e-12), std::log(1e12), -p_avg, 1e-13);
    double nu = std::exp(log_nu);
    for (std::size_t i = 0; i < gain.size(); ++i) {
        if (gain[i] > 0.0) p[i] = std::max(0.0, 1.0 / nu - 1.0 / gain[i]);
    }
    if (nu_out) *nu_out = nu;
    return p;
}

}  // namespace

void ErgodicQuantizer::validate(double p_avg) const {
    const int f_levels = static_cast<int>(powers.size());
    if (f_levels < 1 || static_cast<int>(thresholds.size()) != f_levels + 1) {
        throw std::domain_error("ErgodicQuantizer: inconsistent sizes");
    }
    if (thresholds.front() != 0.0 || thresholds.back() != kInf) {
        throw std::domain_error("ErgodicQuantizer: thresholds must run 0 .. +inf");
    }
    for (int f = 0; f < f_levels; ++f) {
        if (thresholds[f + 1] < thresholds[f]) {
            throw std::domain_error("ErgodicQuantizer: thresholds must be non-decreasing");
        }
        if (f > 0 && powers[f] < powers[f - 1]) {
            throw std::domain_error("ErgodicQuantizer: powers must be non-decreasing");
        }
    }
    if (!(powers.front() >= 0.0)) throw std::domain_error("ErgodicQuantizer: negative power");
    if (powers.back() > (1.0 + 1e-6) / lambda) {
        throw std::domain_error("ErgodicQuantizer: top power exceeds 1/lambda");
    }
    double avg = average_power();
    if (std::abs(avg - p_avg) > 1e-6 * p_avg) {
        throw std::domain_error("ErgodicQuantizer: power budget not met with equality");
    }
}

double ErgodicQuantizer::average_power() const {
    return average_power_for(powers, thresholds);
}

double ergodic_no_csi(double p_avg) {
    if (!(p_avg > 0.0)) throw std::domain_error("ergodic_no_csi: requires p_avg > 0");
    return exp_e1(1.0 / p_avg);
}

FullCsiErgodic ergodic_full_csi(double p_avg) {
    if (!(p_avg > 0.0)) throw std::domain_error("ergodic_full_csi: requires p_avg > 0");
    auto neg_power = [](double log_lam) {
        double lam = std::exp(log_lam);
        return -std::exp(-lam) * (1.0 / lam - exp_e1(lam));
    };
    double log_lam =
        bisect_increasing(neg_power, std::log(kLambdaLo), std::log(kLambdaHi), -p_avg, 1e-14);
    FullCsiErgodic out;
    out.lambda = std::exp(log_lam);
    out.eta = e1(out.lambda);
    return out;
}

PartialCsiErgodic ergodic_partial_csi(double p_avg, int f_levels, const SearchSpec& spec) {
    if (!(p_avg > 0.0)) throw std::domain_error("ergodic_partial_csi: requires p_avg > 0");
    if (f_levels < 2) throw std::domain_error("ergodic_partial_csi: requires F >= 2");

    auto evaluate = [&](std::span<const double> z) {
        std::vector<double> p = powers_from_coords(z);
        bool feasible = false;
        double lam = solve_lambda(p, p_avg, &feasible);
        std::vector<double> s = thresholds_from_powers(p, lam);
        double residual = std::abs(average_power_for(p, s) - p_avg) / p_avg;
        return objective_eta(p, s) - 1e4 * residual;
    };

    // Water-filling-shaped starting point: powers at equal-probability
    // centroids of the full-CSI solution's active region.
    FadingModel model = rayleigh_model();
    FullCsiErgodic wf = ergodic_full_csi(p_avg);
    std::vector<double> p0(f_levels, 0.0);
    for (int f = 0; f < f_levels; ++f) {
        double u = (f + 0.5) / f_levels;
        double g = model.quantile(u);
        p0[f] = std::max(1e-9 * p_avg, 1.0 / wf.lambda - 1.0 / std::max(g, wf.lambda));
    }
    std::sort(p0.begin(), p0.end());
    auto coords_of = [&](const std::vector<double>& p) {
        std::vector<double> z(p.size());
        z[0] = std::log(std::max(p[0], 1e-12 * p_avg));
        for (std::size_t i = 1; i < p.size(); ++i) {
            z[i] = std::log(std::max(p[i] - p[i - 1], 1e-12 * p_avg));
        }
        return z;
    };

    ErgodicBounds lloyd = ergodic_bounds_lloyd(p_avg, f_levels);
    std::vector<std::vector<double>> starts;
    starts.push_back(coords_of(p0));
    {
        // Powers water-filled on the Lloyd (centroid) partition.
        const auto& s = lloyd.thresholds;
        std::vector<double> gain(f_levels), prob(f_levels), pw;
        for (int f = 0; f < f_levels; ++f) {
            gain[f] = model.conditional_mean(s[f], s[f + 1]);
            prob[f] = std::exp(-s[f]) - (s[f + 1] == kInf ? 0.0 : std::exp(-s[f + 1]));
        }
        pw = waterfill(gain, prob, p_avg, nullptr);
        std::sort(pw.begin(), pw.end());
        starts.push_back(coords_of(pw));
    }
    int restarts = std::max(1, spec.restarts);
    for (int k = static_cast<int>(starts.size()); k < restarts; ++k) {
        starts.push_back(jitter(starts[k % 2], 0.7, spec.seed, static_cast<std::uint64_t>(k)));
    }
    SearchResult best = multi_start_max(evaluate, starts, 0.4, spec.tol, spec.max_iters);

    PartialCsiErgodic out;
    out.quantizer.powers = powers_from_coords(best.x);
    bool feasible = false;
    out.quantizer.lambda = solve_lambda(out.quantizer.powers, p_avg, &feasible);
    if (!feasible) throw std::domain_error("ergodic_partial_csi: search left the feasible set");
    out.quantizer.thresholds =
        thresholds_from_powers(out.quantizer.powers, out.quantizer.lambda);
    out.eta = objective_eta(out.quantizer.powers, out.quantizer.thresholds);
    return out;
}

ErgodicBounds ergodic_bounds_lloyd(double p_avg, int f_levels) {
    if (!(p_avg > 0.0)) throw std::domain_error("ergodic_bounds_lloyd: requires p_avg > 0");
    if (f_levels < 1) throw std::domain_error("ergodic_bounds_lloyd: requires F >= 1");
    FadingModel model = rayleigh_model();

    // One Lloyd pass: water-fill powers on the quantized gains, then move the
    // interior thresholds to the indifference points of the priced objective.
    auto run = [&](bool centroid, std::vector<double> s, std::vector<double>* s_out) {
        std::vector<double> gain(f_levels), prob(f_levels), p;
        double value = 0.0;
        for (int iter = 0; iter < 500; ++iter) {
            for (int f = 0; f < f_levels; ++f) {
                gain[f] = centroid ? model.conditional_mean(s[f], s[f + 1]) : s[f];
                prob[f] = std::exp(-s[f]) - (s[f + 1] == kInf ? 0.0 : std::exp(-s[f + 1]));
            }
            double nu = 0.0;
            p = waterfill(gain, prob, p_avg, &nu);
            double move = 0.0;
            for (int f = 1; f < f_levels; ++f) {
                double d = p[f] - p[f - 1];
                double base = d > 1e-14 ? d / std::expm1(nu * d) : 1.0 / nu;
                double inv = base - p[f - 1];
                double raw = inv > 0.0 ? 1.0 / inv : s[f];
                raw = std::max(raw, s[f - 1]);
                move = std::max(move, std::abs(raw - s[f]));
                s[f] = raw;
            }
            if (move < 1e-8) break;
        }
        for (int f = 0; f < f_levels; ++f) {
            gain[f] = centroid ? model.conditional_mean(s[f], s[f + 1]) : s[f];
            prob[f] = std::exp(-s[f]) - (s[f + 1] == kInf ? 0.0 : std::exp(-s[f + 1]));
        }
        p = waterfill(gain, prob, p_avg, nullptr);
        value = 0.0;
        for (int f = 0; f < f_levels; ++f) {
            if (gain[f] > 0.0) value += std::log1p(gain[f] * p[f]) * prob[f];
        }
        if (s_out) *s_out = s;
        return value;
    };

    ErgodicBounds out;
    for (double scale : {0.5, 1.0, 2.0}) {
        std::vector<double> init(f_levels + 1);
        init[0] = 0.0;
        for (int f = 1; f < f_levels; ++f) {
            init[f] = scale * model.quantile(static_cast<double>(f) / f_levels);
        }
        init[f_levels] = kInf;
        std::vector<double> s_up, s_lo;
        double up = run(true, init, &s_up);
        double lo = run(false, init, &s_lo);
        if (up > out.upper) {
            out.upper = up;
            out.thresholds = s_up;
        }
        if (lo > out.lower) {
            out.lower = lo;
            out.lower_thresholds = s_lo;
        }
    }
    return out;
}

}  // namespace harq
