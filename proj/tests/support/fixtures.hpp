#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "bumpforge/firing_rates.hpp"
#include "bumpforge/kernels.hpp"
#include "bumpforge/limit_bump.hpp"

namespace fixtures {

inline constexpr double kFhnK = 1.339;
inline constexpr double kFhnH = 0.2;
inline constexpr double kTwoBumpH = 0.3;

/// Closed-form half-width of the exponential-kernel 1-bump: W(2a) = h.
inline double fhn_half_width(double k = kFhnK, double h = kFhnH) { return -std::log(1.0 - 2.0 * k * k * h) / (2.0 * k); }

inline bumpforge::KernelModel fhn_kernel() { return bumpforge::make_kernel(bumpforge::Exponential{kFhnK}); }
inline bumpforge::KernelModel two_gauss_kernel() { return bumpforge::make_kernel(bumpforge::DiffGaussians{3, 2, 1, 0.5}); }
inline bumpforge::KernelModel wizard_kernel() { return bumpforge::make_kernel(bumpforge::WizardHat{1.5}); }

inline bumpforge::LimitBump fhn_bump() {
    const std::vector<double> guess{0.4};
    return bumpforge::solve_crossings(fhn_kernel(), kFhnH, 1, guess);
}
inline bumpforge::LimitBump two_bump_a() {
    const std::vector<double> guess{0.3, 0.8};
    return bumpforge::solve_crossings(two_gauss_kernel(), kTwoBumpH, 2, guess);
}
inline bumpforge::LimitBump two_bump_b() {
    const std::vector<double> guess{0.4, 0.65};
    return bumpforge::solve_crossings(two_gauss_kernel(), kTwoBumpH, 2, guess);
}

inline bumpforge::FiringRateModel hill(double beta, double h) {
    return bumpforge::make_firing_rate(bumpforge::FiringFamily::Hill, beta, h, 2.0);
}
inline bumpforge::FiringRateModel step(double h) {
    return bumpforge::make_firing_rate(bumpforge::FiringFamily::Step, bumpforge::infinite_beta, h);
}

/// Independent quadrature oracle (adaptive Gauss–Kronrod, 61 points).
template <class F>
double integrate(F f, double a, double b) {
    if (a == b) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-12, &error);
}

/// ∫_a^b with an extra split at each listed interior point.
template <class F>
double integrate_split(F f, double a, double b, std::vector<double> splits) {
    double sum = 0.0;
    double lo = a;
    for (double s : splits) {
        if (s > lo && s < b) {
            sum += integrate(f, lo, s);
            lo = s;
        }
    }
    return sum + integrate(f, lo, b);
}

}  // namespace fixtures
