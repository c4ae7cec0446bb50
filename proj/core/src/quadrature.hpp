#pragma once

// Internal integration helpers shared by order_stats.cpp and harq.cpp.
// Not installed; test oracles use independent integrators.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace harq::detail {

// Adaptive Simpson with absolute tolerance.
template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Gauss-Legendre nodes/weights on [0,1], computed once by Newton iteration.
struct GaussLegendre {
    std::vector<double> node;
    std::vector<double> weight;

    explicit GaussLegendre(int n) : node(n), weight(n) {
        for (int i = 0; i < n; ++i) {
            // Initial guess on [-1,1], then Newton on P_n.
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            node[i] = 0.5 * (1.0 + x);
            weight[i] = 1.0 / ((1.0 - x * x) * pp * pp);  // = w/2 mapped to [0,1]
        }
    }

    template <class F>
    double integrate(const F& f, double a, double b) const {
        if (!(b > a)) return 0.0;
        double h = b - a;
        double acc = 0.0;
        for (std::size_t i = 0; i < node.size(); ++i) {
            acc += weight[i] * f(a + h * node[i]);
        }
        return acc * h;
    }
};

inline const GaussLegendre& gl32() {
    static const GaussLegendre g(32);
    return g;
}
inline const GaussLegendre& gl48() {
    static const GaussLegendre g(48);
    return g;
}

}  // namespace harq::detail
