#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bumpforge/firing_rates.hpp"
#include "bumpforge/kernels.hpp"

namespace bumpforge {

struct Sample {
    double u;
    double du;
};

/// Pointwise access to a candidate function and its derivative.
using Sampler = std::function<Sample(double)>;

struct CrossingSearchOptions {
    int points = 10000;
    double bisect_tol = 1e-12;
    /// Local extrema closer than this to h count as tangential roots.
    double tangency_tol = 1e-10;
    bool include_tangencies = true;
};

/// Roots of u(x) = h on [lo, hi], sorted. Transversal roots come from sign
/// changes on a uniform grid refined by bisection; tangential roots from
/// extrema of u that touch h.
std::vector<double> find_threshold_crossings(const Sampler& u, double h, double lo, double hi,
                                             const CrossingSearchOptions& options = {});

struct BumpClassification {
    std::vector<double> crossings_found;
    bool is_bump = false;
    bool is_regular = false;
    double margin_gamma = 0.0;
    double window_A = 0.0;
    std::vector<double> slopes_at_crossings;
};

struct ClassifyOptions {
    CrossingSearchOptions search{};
    double slope_tol = 1e-8;
};

/// Checks the bump definition: the only roots of u = h are an even number of
/// points inside [−search_halfwidth, search_halfwidth], and u stays below
/// h − γ on search_halfwidth ≤ |x| ≤ decay_halfwidth. Throws InvalidParameter
/// unless 0 < search_halfwidth < decay_halfwidth.
BumpClassification classify_bump(const Sampler& u, double h, double search_halfwidth,
                                 double decay_halfwidth, const ClassifyOptions& options = {});

/// Exact β = ∞ operator for a function whose superthreshold set is
/// ∪ [b_{2k−1}, b_{2k}]: Σ_k W(x − b_{2k−1}) − W(x − b_{2k}).
/// Throws OddCrossings for an odd number of crossings.
double step_operator(std::span<const double> crossings, const KernelModel& kernel, double x);

struct ResidualOptions {
    /// Crossings of u are searched on [−search_halfwidth, search_halfwidth].
    double search_halfwidth = 10.0;
    /// Integration window for firing rates without threshold support.
    double window_halfwidth = 20.0;
    double panel_width = 1e-3;
    int quadrature_order = 8;
    CrossingSearchOptions search{.points = 20000, .include_tangencies = false};
};

/// max over the test grid of |u(x) − (H_β u)(x)|, with H_β taken over the
/// whole line. For β = ∞ the step operator on the detected crossings is used.
double residual_fixed_point(const Sampler& u, const KernelModel& kernel, const FiringRateModel& firing,
                            std::span<const double> test_grid, const ResidualOptions& options = {});

}  // namespace bumpforge
