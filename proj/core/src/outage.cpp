#include "harq/outage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "harq/fading.hpp"

namespace harq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThresholdHi = 60.0;  // Rayleigh mass above is ~1e-26

double cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }
double surv(double x) { return x == kInf ? 0.0 : std::exp(-x); }

// Power-normalized denominator sum_f Pr[R_f]/s_f for a full threshold set
// (interior ladder + wrap); eta = (1 - F(s_1)) log(1 + p_avg / D).
double wrap_denominator(const std::vector<double>& interior, double wrap) {
    double d = (cdf(interior.front()) + surv(wrap)) / wrap;
    for (std::size_t f = 0; f + 1 < interior.size(); ++f) {
        d += (surv(interior[f]) - surv(interior[f + 1])) / interior[f];
    }
    d += (surv(interior.back()) - surv(wrap)) / interior.back();
    return d;
}

double wrap_eta(double p_avg, const std::vector<double>& interior, double wrap) {
    double d = wrap_denominator(interior, wrap);
    if (!(d > 0.0)) return 0.0;
    return surv(interior.front()) * std::log1p(p_avg / d);
}

// Interval ladder s_1..s_G with the top region [s_G, inf): the eta_hat bound.
double ladder_eta(double p_avg, const std::vector<double>& s) {
    double d = 0.0;
    for (std::size_t f = 0; f < s.size(); ++f) {
        double hi = f + 1 < s.size() ? surv(s[f + 1]) : 0.0;
        d += (surv(s[f]) - hi) / s[f];
    }
    if (!(d > 0.0)) return 0.0;
    return surv(s.front()) * std::log1p(p_avg / d);
}

std::vector<double> ladder_from_coords(std::span<const double> z) {
    std::vector<double> s(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        double inc = std::exp(std::clamp(z[i], -300.0, 300.0));
        s[i] = i == 0 ? inc : s[i - 1] + inc;
    }
    return s;
}

std::vector<double> coords_from_ladder(const std::vector<double>& s) {
    std::vector<double> z(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        double inc = i == 0 ? s[0] : s[i] - s[i - 1];
        z[i] = std::log(std::max(inc, 1e-12));
    }
    return z;
}

std::vector<std::vector<double>> ladder_starts(int dims, int restarts, std::uint64_t seed) {
    std::vector<std::vector<double>> starts;
    for (double scale : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        std::vector<double> s(dims);
        for (int i = 0; i < dims; ++i) {
            s[i] = scale * (i + 1.0) / dims;  // linear ladder, log-spaced by scale
        }
        starts.push_back(coords_from_ladder(s));
        if (static_cast<int>(starts.size()) >= restarts) return starts;
    }
    int base = static_cast<int>(starts.size());
    for (int k = base; k < restarts; ++k) {
        starts.push_back(jitter(starts[k % base], 1.0, seed, static_cast<std::uint64_t>(k)));
    }
    return starts;
}

OutagePartial run_partial(double p_avg, int f_levels, const SearchSpec& spec, bool free_wrap,
                          const std::vector<double>& warm_thresholds) {
    if (!(p_avg > 0.0)) throw std::domain_error("outage_partial_csi: requires p_avg > 0");
    if (f_levels < 2) throw std::domain_error("outage_partial_csi: requires F >= 2");

    const int interior_count = f_levels - 1;

    auto unpack = [&](std::span<const double> z, std::vector<double>* interior, double* wrap) {
        std::vector<double> full = ladder_from_coords(z.subspan(0, interior_count));
        *interior = full;
        if (free_wrap) {
            double gap = std::exp(std::clamp(z[interior_count], -300.0, 700.0));
            *wrap = full.back() + gap;
        } else {
            *wrap = kInf;
        }
    };
    auto evaluate = [&](std::span<const double> z) {
        std::vector<double> interior;
        double wrap = 0.0;
        unpack(z, &interior, &wrap);
        return wrap_eta(p_avg, interior, wrap);
    };

    std::vector<std::vector<double>> starts;
    for (auto& z : ladder_starts(interior_count, std::max(1, spec.restarts), spec.seed)) {
        if (free_wrap) {
            z.push_back(14.0);  // wrap gap e^14: effectively interval-only
            starts.push_back(z);
            z.back() = 0.0;  // wrap right above the ladder: union-of-intervals shape
            starts.push_back(z);
        } else {
            starts.push_back(z);
        }
    }
    if (!warm_thresholds.empty()) {
        // Embed a lower-F solution: duplicate its top interior threshold so the
        // extra regions carry zero mass and the warm value is reproduced.
        std::vector<double> interior(warm_thresholds.begin(), warm_thresholds.end() - 1);
        double wrap = warm_thresholds.back();
        while (static_cast<int>(interior.size()) < interior_count) {
            interior.push_back(interior.back() + 1e-9);
        }
        std::vector<double> z = coords_from_ladder(interior);
        if (free_wrap) {
            double gap = wrap == kInf ? std::exp(16.0) : std::max(wrap - interior.back(), 1e-9);
            z.push_back(std::log(gap));
        }
        starts.insert(starts.begin(), z);
    }
    SearchResult best = multi_start_max(evaluate, starts, 0.5, spec.tol, spec.max_iters);

    OutagePartial out;
    double wrap = 0.0;
    unpack(best.x, &out.quantizer.interior, &wrap);
    out.quantizer.wrap = wrap;
    out.eta = wrap_eta(p_avg, out.quantizer.interior, wrap);
    double d = wrap_denominator(out.quantizer.interior, wrap);
    out.quantizer.rate = std::log1p(p_avg / d);
    return out;
}

}  // namespace

void OutageQuantizer::validate() const {
    if (interior.empty()) throw std::domain_error("OutageQuantizer: needs s_1..s_{F-1}");
    double prev = 0.0;
    for (double s : interior) {
        if (!(s >= prev) || s == kInf) {
            throw std::domain_error("OutageQuantizer: interior thresholds must be finite and ordered");
        }
        prev = s;
    }
    if (!(wrap >= prev)) throw std::domain_error("OutageQuantizer: wrap threshold below ladder");
    if (!(rate > 0.0)) throw std::domain_error("OutageQuantizer: rate must be positive");
}

std::vector<double> OutageQuantizer::powers() const {
    double theta = std::expm1(rate);
    std::vector<double> p;
    p.push_back(wrap == kInf ? 0.0 : theta / wrap);
    for (double s : interior) p.push_back(theta / s);
    return p;
}

double OutageQuantizer::outage_probability() const { return cdf(interior.front()); }

double OutageQuantizer::average_power() const {
    return std::expm1(rate) * wrap_denominator(interior, wrap);
}

OutagePoint outage_no_csi(double p_avg) {
    if (!(p_avg > 0.0)) throw std::domain_error("outage_no_csi: requires p_avg > 0");
    OutagePoint out;
    out.eta = scan_golden_max([&](double s) { return std::log1p(p_avg * s) * std::exp(-s); },
                              0.0, kThresholdHi, 1024, 1e-12, &out.threshold);
    return out;
}

OutagePoint outage_one_bit(double p_avg) {
    if (!(p_avg > 0.0)) throw std::domain_error("outage_one_bit: requires p_avg > 0");
    OutagePoint out;
    out.eta = scan_golden_max(
        [&](double s) { return std::exp(-s) * std::log1p(p_avg * s * std::exp(s)); }, 0.0,
        kThresholdHi, 1024, 1e-12, &out.threshold);
    return out;
}

OutagePoint outage_full_csi(double p_avg) {
    if (!(p_avg > 0.0)) throw std::domain_error("outage_full_csi: requires p_avg > 0");
    OutagePoint out;
    out.eta = scan_golden_max(
        [&](double t) {
            if (t <= 0.0) return 0.0;
            return std::exp(-t) * std::log1p(p_avg / e1(t));
        },
        1e-12, kThresholdHi, 1024, 1e-12, &out.threshold);
    return out;
}

OutagePartial outage_partial_csi(double p_avg, int f_levels, const SearchSpec& spec,
                                 const std::vector<double>& warm_thresholds) {
    return run_partial(p_avg, f_levels, spec, /*free_wrap=*/true, warm_thresholds);
}

OutagePartial outage_partial_csi_interval(double p_avg, int f_levels, const SearchSpec& spec) {
    return run_partial(p_avg, f_levels, spec, /*free_wrap=*/false, {});
}

OutageBoundPair outage_bound_pair(double p_avg, int f_levels, const SearchSpec& spec) {
    if (!(p_avg > 0.0)) throw std::domain_error("outage_bound_pair: requires p_avg > 0");
    if (f_levels < 2) throw std::domain_error("outage_bound_pair: requires F >= 2");

    auto eta_hat = [&](int g, std::vector<double>* ladder_out) {
        if (g == 1) {
            OutagePoint p = outage_no_csi(p_avg);
            if (ladder_out) *ladder_out = {p.threshold};
            return p.eta;
        }
        auto evaluate = [&](std::span<const double> z) {
            return ladder_eta(p_avg, ladder_from_coords(z));
        };
        auto starts = ladder_starts(g, std::max(1, spec.restarts), spec.seed);
        SearchResult best = multi_start_max(evaluate, starts, 0.5, spec.tol, spec.max_iters);
        if (ladder_out) *ladder_out = ladder_from_coords(best.x);
        return best.value;
    };

    OutageBoundPair out;
    out.lower = eta_hat(f_levels - 1, nullptr);
    out.upper = eta_hat(f_levels, &out.thresholds);

    if (f_levels >= 4) {
        auto geo = [&](std::span<const double> z) {
            double s1 = std::exp(std::clamp(z[0], -300.0, 300.0));
            double xi = 1.0 + std::exp(std::clamp(z[1], -300.0, 300.0));
            std::vector<double> s(f_levels);
            for (int f = 0; f < f_levels; ++f) s[f] = s1 * std::pow(xi, f);
            return ladder_eta(p_avg, s);
        };
        std::vector<std::vector<double>> starts;
        for (double s1 : {0.25, 1.0, 4.0}) {
            for (double gap : {0.1, 1.0}) {
                starts.push_back({std::log(s1), std::log(gap)});
            }
        }
        SearchResult best = multi_start_max(geo, starts, 0.5, spec.tol, spec.max_iters);
        out.geometric_eta = best.value;
        out.geometric_xi = 1.0 + std::exp(best.x[1]);
    }
    return out;
}

}  // namespace harq
