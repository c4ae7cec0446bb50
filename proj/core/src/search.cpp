#include "harq/search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace harq {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_from(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

double scan_golden_max(const std::function<double(double)>& f, double lo, double hi,
                       int scan_points, double tol, double* arg_out) {
    double best_x = lo;
    double best_v = f(lo);
    double h = (hi - lo) / scan_points;
    for (int i = 1; i <= scan_points; ++i) {
        double x = lo + i * h;
        double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - h);
    double b = std::min(hi, best_x + h);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    double xm = 0.5 * (a + b);
    double vm = f(xm);
    if (best_v > vm) {
        xm = best_x;
        vm = best_v;
    }
    if (arg_out) *arg_out = xm;
    return vm;
}

double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double target, double rel_tol) {
    double flo = f(lo);
    if (flo >= target) return lo;
    double fhi = f(hi);
    if (fhi <= target) return hi;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if ((hi - lo) <= rel_tol * std::max(std::abs(lo), std::abs(hi))) return mid;
        if (f(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SearchResult nelder_mead_max(const Objective& f, std::span<const double> start,
                             double step, double tol, int max_iters) {
    const int n = static_cast<int>(start.size());
    SearchResult res;
    if (n == 0) {
        res.x = {};
        res.value = f(std::span<const double>{});
        res.evals = 1;
        return res;
    }

    std::vector<std::vector<double>> pts(n + 1, std::vector<double>(start.begin(), start.end()));
    std::vector<double> vals(n + 1);
    for (int i = 1; i <= n; ++i) pts[i][i - 1] += step;
    int evals = 0;
    for (int i = 0; i <= n; ++i) {
        vals[i] = f(pts[i]);
        ++evals;
    }

    std::vector<int> ord(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    for (int iter = 0; iter < max_iters; ++iter) {
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return vals[a] > vals[b]; });
        int best = ord[0], worst = ord[n], second_worst = ord[n - 1];
        if (vals[best] - vals[worst] <= tol * (std::abs(vals[best]) + tol)) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (int d = 0; d < n; ++d) centroid[d] += pts[i][d];
        }
        for (int d = 0; d < n; ++d) centroid[d] /= n;

        auto blend = [&](std::vector<double>& out, double c) {
            for (int d = 0; d < n; ++d) out[d] = centroid[d] + c * (centroid[d] - pts[worst][d]);
        };

        blend(trial, 1.0);  // reflection
        double v_ref = f(trial);
        ++evals;
        if (v_ref > vals[best]) {
            blend(trial2, 2.0);  // expansion
            double v_exp = f(trial2);
            ++evals;
            if (v_exp > v_ref) {
                pts[worst] = trial2;
                vals[worst] = v_exp;
            } else {
                pts[worst] = trial;
                vals[worst] = v_ref;
            }
        } else if (v_ref > vals[second_worst]) {
            pts[worst] = trial;
            vals[worst] = v_ref;
        } else {
            blend(trial2, -0.5);  // contraction
            double v_con = f(trial2);
            ++evals;
            if (v_con > vals[worst]) {
                pts[worst] = trial2;
                vals[worst] = v_con;
            } else {
                for (int i = 0; i <= n; ++i) {  // shrink toward best
                    if (i == best) continue;
                    for (int d = 0; d < n; ++d) {
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    }
                    vals[i] = f(pts[i]);
                    ++evals;
                }
            }
        }
    }
    int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.value = vals[best];
    res.evals = evals;
    return res;
}

SearchResult multi_start_max(const Objective& f, const std::vector<std::vector<double>>& starts,
                             double step, double tol, int max_iters) {
    std::vector<std::future<SearchResult>> futs;
    futs.reserve(starts.size());
    for (const auto& s : starts) {
        futs.push_back(std::async(std::launch::async, [&, s] {
            return nelder_mead_max(f, s, step, tol, max_iters);
        }));
    }
    SearchResult best;
    bool first = true;
    for (auto& fu : futs) {
        SearchResult r = fu.get();
        if (first || r.value > best.value) {
            best = std::move(r);
            first = false;
        }
    }
    return best;
}

std::vector<double> jitter(std::span<const double> base, double scale, std::uint64_t seed,
                           std::uint64_t index) {
    std::vector<double> out(base.begin(), base.end());
    std::uint64_t state = splitmix(seed ^ splitmix(index * 0x9E3779B97F4A7C15ULL + 1));
    for (double& v : out) {
        state = splitmix(state);
        v += scale * (2.0 * unit_from(state) - 1.0);
    }
    return out;
}

}  // namespace harq
