#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bumpforge::numerics {

/// Gauss–Legendre rule mapped to the unit interval [0, 1]; weights sum to 1.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// Rules are computed once per order and cached; the returned reference is
/// valid for the lifetime of the program.
const GaussLegendreRule& gauss_legendre(int order);

using ScalarFn = std::function<double(double)>;

/// Adaptive Simpson quadrature with Richardson correction.
double adaptive_simpson(const ScalarFn& f, double a, double b, double tol, int max_depth = 48);

/// Root of f on [lo, hi] by bisection; requires f(lo) and f(hi) of opposite sign
/// (or one of them zero).
double bisect(const ScalarFn& f, double lo, double hi, double tol = 1e-14, int max_iter = 200);

/// Sup of |f| on [lo, hi]: dense sampling followed by golden-section polishing
/// around the best sample.
double max_abs(const ScalarFn& f, double lo, double hi, int samples = 20001);

inline double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        const double a = x < 0 ? -x : x;
        if (a > m || a != a) m = a;
    }
    return m;
}

}  // namespace bumpforge::numerics
