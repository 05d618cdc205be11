#include "bumpforge/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "bumpforge/errors.hpp"

namespace bumpforge::numerics {

namespace {

GaussLegendreRule compute_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Reference interval [-1,1] -> [0,1]; ascending order.
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return rule;
}

double simpson_step(const ScalarFn& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
    if (order < 1 || order > 64) {
        fail(ErrorCode::InvalidParameter, "Gauss-Legendre order must be in [1, 64]");
    }
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double adaptive_simpson(const ScalarFn& f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    // Split into a few fixed pieces first so narrow features are not missed.
    constexpr int pieces = 16;
    const double h = (b - a) / pieces;
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == pieces) ? b : lo + h;
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fm = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / pieces, max_depth);
    }
    return total;
}

double bisect(const ScalarFn& f, double lo, double hi, double tol, int max_iter) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    const double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if ((flo < 0) == (fhi < 0)) {
        fail(ErrorCode::InvalidParameter, "bisect: no sign change on bracket");
    }
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double max_abs(const ScalarFn& f, double lo, double hi, int samples) {
    const double h = (hi - lo) / (samples - 1);
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < samples; ++i) {
        const double v = std::abs(f(lo + i * h));
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    // Golden-section on the bracketing cells.
    double a = std::max(lo, lo + (best - 1) * h);
    double b = std::min(hi, lo + (best + 1) * h);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = std::abs(f(c));
    double fd = std::abs(f(d));
    for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = std::abs(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = std::abs(f(d));
        }
    }
    return std::max({best_val, fc, fd});
}

}  // namespace bumpforge::numerics
