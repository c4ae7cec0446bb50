#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace harq {

/// Shared configuration for the derivative-free searches.
struct SearchSpec {
    int dims = 0;                                   // 0 = derive from the problem
    std::vector<std::pair<double, double>> bounds;  // transformed coordinates
    int restarts = 8;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    int max_iters = 600;  // per restart
};

using Objective = std::function<double(std::span<const double>)>;

struct SearchResult {
    std::vector<double> x;
    double value = -1e300;
    int evals = 0;
};

/// Maximize a unimodal-enough 1-D function: coarse scan with `scan_points`
/// cells, then golden-section inside the bracketing pair of cells.
double scan_golden_max(const std::function<double(double)>& f, double lo, double hi,
                       int scan_points, double tol, double* arg_out = nullptr);

/// Find x in [lo, hi] with f(x) = target for non-decreasing f, by bisection
/// to `rel_tol` relative on x. Returns the clamped endpoint when the target
/// is not bracketed.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double target, double rel_tol);

/// Nelder-Mead simplex ascent (maximization) from one start point.
SearchResult nelder_mead_max(const Objective& f, std::span<const double> start,
                             double step, double tol, int max_iters);

/// Run nelder_mead_max from each start concurrently and keep the best result;
/// ties break on the lowest start index so the outcome is deterministic.
SearchResult multi_start_max(const Objective& f, const std::vector<std::vector<double>>& starts,
                             double step, double tol, int max_iters);

/// Deterministic jitter helper for building restart points.
std::vector<double> jitter(std::span<const double> base, double scale, std::uint64_t seed,
                           std::uint64_t index);

}  // namespace harq
