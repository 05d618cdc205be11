#include "bumpforge/verification.hpp"

#include <algorithm>
#include <cmath>

#include "bumpforge/errors.hpp"
#include "bumpforge/numerics.hpp"

namespace bumpforge {

std::vector<double> find_threshold_crossings(const Sampler& u, double h, double lo, double hi,
                                             const CrossingSearchOptions& options) {
    const int n = std::max(options.points, 2);
    const double dx = (hi - lo) / n;
    std::vector<Sample> s(n + 1);
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) {
        x[i] = (i == n) ? hi : lo + i * dx;
        s[i] = u(x[i]);
    }
    auto g = [&](double t) { return u(t).u - h; };
    auto slope = [&](double t) { return u(t).du; };

    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        const double g0 = s[i].u - h;
        const double g1 = s[i + 1].u - h;
        if ((g0 < 0) != (g1 < 0)) {
            roots.push_back(numerics::bisect(g, x[i], x[i + 1], options.bisect_tol));
        } else if (options.include_tangencies && (s[i].du < 0) != (s[i + 1].du < 0)) {
            const double xs = numerics::bisect(slope, x[i], x[i + 1], options.bisect_tol);
            if (std::abs(g(xs)) <= options.tangency_tol) roots.push_back(xs);
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) { return std::abs(a - b) <= 10 * options.bisect_tol; }),
                roots.end());
    return roots;
}

BumpClassification classify_bump(const Sampler& u, double h, double search_halfwidth, double decay_halfwidth,
                                 const ClassifyOptions& options) {
    if (!(search_halfwidth > 0) || !(decay_halfwidth > search_halfwidth)) {
        fail(ErrorCode::InvalidParameter, "classify_bump requires 0 < search_halfwidth < decay_halfwidth");
    }
    BumpClassification cls;
    cls.crossings_found = find_threshold_crossings(u, h, -search_halfwidth, search_halfwidth, options.search);
    for (double b : cls.crossings_found) cls.slopes_at_crossings.push_back(u(b).du);

    const auto left = find_threshold_crossings(u, h, -decay_halfwidth, -search_halfwidth, options.search);
    const auto right = find_threshold_crossings(u, h, search_halfwidth, decay_halfwidth, options.search);

    // Largest value on the decay region.
    const int n = std::max(options.search.points, 2);
    const double dx = (decay_halfwidth - search_halfwidth) / n;
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double t = search_halfwidth + i * dx;
        peak = std::max({peak, u(t).u, u(-t).u});
    }
    const double gap = h - peak;

    cls.window_A = search_halfwidth;
    cls.margin_gamma = gap > 0 ? 0.5 * gap : 0.0;
    const std::size_t count = cls.crossings_found.size();
    cls.is_bump = count > 0 && count % 2 == 0 && left.empty() && right.empty() && gap > 0;
    cls.is_regular = cls.is_bump && std::all_of(cls.slopes_at_crossings.begin(), cls.slopes_at_crossings.end(),
                                                [&](double s) { return std::abs(s) > options.slope_tol; });
    return cls;
}

double step_operator(std::span<const double> crossings, const KernelModel& kernel, double x) {
    if (crossings.size() % 2 != 0) {
        fail(ErrorCode::OddCrossings, "step operator needs an even number of crossings, got " +
                                          std::to_string(crossings.size()));
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < crossings.size(); k += 2) {
        sum += kernel.antideriv(x - crossings[k]) - kernel.antideriv(x - crossings[k + 1]);
    }
    return sum;
}

namespace {

struct Panel {
    double lo;
    double hi;
    std::size_t begin;
    std::size_t end;
};

struct DensityNode {
    double y;
    double weight;
};

void add_panel(double lo, double hi, const numerics::GaussLegendreRule& rule, const Sampler& u,
               const FiringRateModel& firing, std::vector<DensityNode>& out) {
    const double width = hi - lo;
    for (int q = 0; q < rule.size(); ++q) {
        const double y = lo + rule.nodes[q] * width;
        out.push_back({y, rule.weights[q] * width * firing.eval(u(y).u)});
    }
}

}  // namespace

double residual_fixed_point(const Sampler& u, const KernelModel& kernel, const FiringRateModel& firing,
                            std::span<const double> test_grid, const ResidualOptions& options) {
    const double h = firing.h();
    const double search = options.search_halfwidth;
    const std::vector<double> crossings = find_threshold_crossings(u, h, -search, search, options.search);

    double residual = 0.0;
    if (firing.is_step()) {
        for (double x : test_grid) residual = std::max(residual, std::abs(u(x).u - step_operator(crossings, kernel, x)));
        return residual;
    }

    // Integration segments. With threshold support only superthreshold
    // stretches between consecutive crossings carry mass.
    std::vector<std::pair<double, double>> segments;
    if (firing.has_threshold_support()) {
        for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
            const double mid = 0.5 * (crossings[i] + crossings[i + 1]);
            if (u(mid).u >= h) segments.emplace_back(crossings[i], crossings[i + 1]);
        }
    } else {
        std::vector<double> breaks{-options.window_halfwidth};
        for (double c : crossings) {
            if (std::abs(c) < options.window_halfwidth) breaks.push_back(c);
        }
        breaks.push_back(options.window_halfwidth);
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) segments.emplace_back(breaks[i], breaks[i + 1]);
    }

    const auto& rule = numerics::gauss_legendre(options.quadrature_order);
    std::vector<Panel> panels;
    std::vector<DensityNode> nodes;
    for (const auto& [lo, hi] : segments) {
        const int count = std::max(1, static_cast<int>(std::ceil((hi - lo) / options.panel_width)));
        const double width = (hi - lo) / count;
        for (int p = 0; p < count; ++p) {
            const double a = lo + p * width;
            const double b = (p + 1 == count) ? hi : a + width;
            const std::size_t begin = nodes.size();
            add_panel(a, b, rule, u, firing, nodes);
            panels.push_back({a, b, begin, nodes.size()});
        }
    }

    std::vector<DensityNode> local;
    for (double x : test_grid) {
        // The panel containing x is re-split at x when ω′ jumps at 0.
        std::size_t skip = panels.size();
        local.clear();
        if (kernel.has_kink_at_origin()) {
            auto it = std::upper_bound(panels.begin(), panels.end(), x,
                                       [](double v, const Panel& p) { return v < p.lo; });
            if (it != panels.begin()) {
                --it;
                if (x > it->lo && x < it->hi) {
                    skip = static_cast<std::size_t>(it - panels.begin());
                    add_panel(it->lo, x, rule, u, firing, local);
                    add_panel(x, it->hi, rule, u, firing, local);
                }
            }
        }
        double hx = 0.0;
        for (std::size_t p = 0; p < panels.size(); ++p) {
            if (p == skip) continue;
            for (std::size_t i = panels[p].begin; i < panels[p].end; ++i) hx += kernel.eval(x - nodes[i].y) * nodes[i].weight;
        }
        for (const auto& n : local) hx += kernel.eval(x - n.y) * n.weight;
        residual = std::max(residual, std::abs(u(x).u - hx));
    }
    return residual;
}

}  // namespace bumpforge
