#include "bumpforge/hammerstein.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "bumpforge/errors.hpp"
#include "bumpforge/numerics.hpp"

namespace bumpforge {

namespace {

/// Roots of U − h inside cell c (open interval), ascending.
std::vector<double> threshold_breaks(const GridFunction& u, int c, double h) {
    constexpr int probes = 4;
    const double x0 = u.grid().node(c);
    const double dx = u.grid().spacing() / probes;
    std::vector<double> roots;
    auto g = [&](double x) { return u.interpolate_in_cell(c, x).u - h; };
    double left = x0;
    double g_left = g(left);
    for (int i = 1; i <= probes; ++i) {
        const double right = (i == probes) ? u.grid().node(c + 1) : x0 + i * dx;
        const double g_right = g(right);
        if ((g_left < 0) != (g_right < 0)) {
            const double r = numerics::bisect(g, left, right, 1e-15);
            if (r > x0 && r < u.grid().node(c + 1)) roots.push_back(r);
        }
        left = right;
        g_left = g_right;
    }
    return roots;
}

using CellDensity = std::function<double(int cell, double y)>;

struct Node {
    double y;
    double weight;
};

/// Quadrature layout for one order: regular cells are stored densely for the
/// Toeplitz-style sweep, split cells as explicit nodes.
struct Layout {
    int order = 0;
    std::vector<double> regular;  // (cells × order) weight × density; zero for split cells
    std::vector<Node> split;
};

void append_panel(double lo, double hi, int cell, const numerics::GaussLegendreRule& rule,
                  const CellDensity& density, std::vector<Node>& out) {
    const double width = hi - lo;
    if (width <= 0) return;
    for (int q = 0; q < rule.size(); ++q) {
        const double y = lo + rule.nodes[q] * width;
        out.push_back({y, rule.weights[q] * width * density(cell, y)});
    }
}

/// `pieces` copies of the Gauss–Legendre rule on equal subintervals of [0, 1].
numerics::GaussLegendreRule composite_rule(int order, int pieces) {
    const auto& base = numerics::gauss_legendre(order);
    numerics::GaussLegendreRule rule;
    for (int p = 0; p < pieces; ++p) {
        for (int q = 0; q < base.size(); ++q) {
            rule.nodes.push_back((p + base.nodes[q]) / pieces);
            rule.weights.push_back(base.weights[q] / pieces);
        }
    }
    return rule;
}

Layout build_layout(const GridFunction& u, const numerics::GaussLegendreRule& rule, const CellDensity& density,
                    const std::vector<std::vector<double>>& breaks) {
    const int order = rule.size();
    const Grid& grid = u.grid();
    const double dx = grid.spacing();
    Layout layout;
    layout.order = order;
    layout.regular.assign(static_cast<std::size_t>(grid.cells()) * order, 0.0);
    for (int c = 0; c < grid.cells(); ++c) {
        const double x0 = grid.node(c);
        if (breaks[c].empty()) {
            for (int q = 0; q < order; ++q) {
                const double y = x0 + rule.nodes[q] * dx;
                layout.regular[static_cast<std::size_t>(c) * order + q] = rule.weights[q] * dx * density(c, y);
            }
        } else {
            double lo = x0;
            for (double b : breaks[c]) {
                append_panel(lo, b, c, rule, density, layout.split);
                lo = b;
            }
            append_panel(lo, grid.node(c + 1), c, rule, density, layout.split);
        }
    }
    return layout;
}

/// Kernel table over node offsets: entry (k, q) is f((k − (M−2) − τ_q) Δ).
std::vector<double> offset_table(const Grid& grid, const numerics::GaussLegendreRule& rule,
                                 const std::function<double(double)>& f) {
    const int order = rule.size();
    const int m = grid.size();
    const double dx = grid.spacing();
    std::vector<double> table(static_cast<std::size_t>(2 * m - 2) * order);
    for (int k = 0; k < 2 * m - 2; ++k) {
        const int offset = k - (m - 2);
        for (int q = 0; q < order; ++q) {
            table[static_cast<std::size_t>(k) * order + q] = f((offset - rule.nodes[q]) * dx);
        }
    }
    return table;
}

std::vector<double> convolve(const Grid& grid, const Layout& layout, const std::vector<double>& table,
                             const std::function<double(double)>& f) {
    const int m = grid.size();
    const int cells = grid.cells();
    const int order = layout.order;
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) {
        double sum = 0.0;
        for (int c = 0; c < cells; ++c) {
            const double* t = &table[static_cast<std::size_t>(j - c + m - 2) * order];
            const double* r = &layout.regular[static_cast<std::size_t>(c) * order];
            for (int q = 0; q < order; ++q) sum += t[q] * r[q];
        }
        const double xj = grid.node(j);
        for (const Node& n : layout.split) sum += f(xj - n.y) * n.weight;
        out[j] = sum;
    }
    return out;
}

struct Integrated {
    std::vector<double> values;
    std::vector<double> derivs;
};

Integrated integrate(const GridFunction& u, const KernelModel& kernel, const numerics::GaussLegendreRule& rule,
                     const CellDensity& density, const std::vector<std::vector<double>>& breaks) {
    const Grid& grid = u.grid();
    const Layout layout = build_layout(u, rule, density, breaks);
    auto omega = [&kernel](double x) { return kernel.eval(x); };
    auto omega_prime = [&kernel](double x) { return kernel.deriv(x); };
    Integrated result;
    result.values = convolve(grid, layout, offset_table(grid, rule, omega), omega);
    result.derivs = convolve(grid, layout, offset_table(grid, rule, omega_prime), omega_prime);
    return result;
}

GridFunction integrate_verified(const GridFunction& u, const KernelModel& kernel, double h,
                                const CellDensity& density, const QuadratureOptions& options,
                                const char* what) {
    const Grid& grid = u.grid();
    std::vector<std::vector<double>> breaks(grid.cells());
    for (int c = 0; c < grid.cells(); ++c) breaks[c] = threshold_breaks(u, c, h);

    // Steep firing rates can vary on a scale below the grid spacing; cells are
    // subdivided until the two rules agree.
    double diff = 0.0;
    for (int pieces = 1;; pieces *= 2) {
        Integrated coarse = integrate(u, kernel, composite_rule(options.order, pieces), density, breaks);
        if (!options.verify) return GridFunction(grid, std::move(coarse.values), std::move(coarse.derivs), u.even());
        const Integrated fine = integrate(u, kernel, composite_rule(options.verify_order, pieces), density, breaks);
        diff = 0.0;
        for (int j = 0; j < grid.size(); ++j) {
            diff = std::max(diff, std::abs(fine.values[j] - coarse.values[j]));
            diff = std::max(diff, std::abs(fine.derivs[j] - coarse.derivs[j]));
        }
        if (diff <= options.verify_tol) {
            return GridFunction(grid, std::move(coarse.values), std::move(coarse.derivs), u.even());
        }
        if (pieces >= options.max_subdivisions) break;
    }
    std::ostringstream os;
    os << what << ": quadrature refinement changed the result by " << diff << " (tolerance " << options.verify_tol
       << ")";
    fail(ErrorCode::QuadratureFailure, os.str());
}

void require_finite_beta(const FiringRateModel& firing, const char* what) {
    if (firing.is_step()) {
        fail(ErrorCode::NotApplicable, std::string(what) + " needs a finite beta; use step_operator for beta = inf");
    }
}

}  // namespace

GridFunction apply_H_beta(const GridFunction& u, const KernelModel& kernel, const FiringRateModel& firing,
                          const QuadratureOptions& options) {
    require_finite_beta(firing, "apply_H_beta");
    const CellDensity density = [&](int c, double y) { return firing.eval(u.interpolate_in_cell(c, y).u); };
    return integrate_verified(u, kernel, firing.h(), density, options, "apply_H_beta");
}

GridFunction apply_S_beta(const GridFunction& u, const GridFunction& v, const KernelModel& kernel,
                          const FiringRateModel& firing, const QuadratureOptions& options) {
    require_finite_beta(firing, "apply_S_beta");
    if (!(u.grid() == v.grid())) fail(ErrorCode::InvalidParameter, "apply_S_beta: U and v need a common grid");
    const CellDensity density = [&](int c, double y) {
        return firing.deriv(u.interpolate_in_cell(c, y).u) * v.interpolate_in_cell(c, y).u;
    };
    GridFunction out = integrate_verified(u, kernel, firing.h(), density, options, "apply_S_beta");
    return GridFunction(out.grid(), std::vector<double>(out.values().begin(), out.values().end()),
                        std::vector<double>(out.derivs().begin(), out.derivs().end()), u.even() && v.even());
}

Reconstruction::Reconstruction(GridFunction u, KernelModel kernel, FiringRateModel firing, int order)
    : u_(std::move(u)), kernel_(std::move(kernel)), firing_(firing), order_(order) {
    require_finite_beta(firing_, "reconstruct_T2");
    const Grid& grid = u_.grid();
    cell_breaks_.resize(grid.cells());
    cell_offset_.resize(grid.cells() + 1);
    for (int c = 0; c < grid.cells(); ++c) {
        cell_breaks_[c] = threshold_breaks(u_, c, firing_.h());
        cell_offset_[c] = static_cast<int>(nodes_.size());
        cell_nodes(c, cell_breaks_[c], nodes_);
    }
    cell_offset_[grid.cells()] = static_cast<int>(nodes_.size());
}

void Reconstruction::cell_nodes(int cell, std::vector<double> breaks, std::vector<Node>& out) const {
    const auto& rule = numerics::gauss_legendre(order_);
    std::sort(breaks.begin(), breaks.end());
    double lo = u_.grid().node(cell);
    const double end = u_.grid().node(cell + 1);
    breaks.push_back(end);
    for (double hi : breaks) {
        const double width = hi - lo;
        if (width > 0) {
            for (int q = 0; q < rule.size(); ++q) {
                const double y = lo + rule.nodes[q] * width;
                out.push_back({y, rule.weights[q] * width * firing_.eval(u_.interpolate_in_cell(cell, y).u)});
            }
        }
        lo = hi;
    }
}

Sample Reconstruction::operator()(double x) const {
    const Grid& grid = u_.grid();
    int skip = -1;
    std::vector<Node> local;
    if (x > -grid.half_width() && x < grid.half_width()) {
        const int c = grid.cell_of(x);
        if (x > grid.node(c) && x < grid.node(c + 1)) {
            skip = c;
            std::vector<double> breaks = cell_breaks_[c];
            breaks.push_back(x);
            cell_nodes(c, std::move(breaks), local);
        }
    }
    double value = 0.0;
    double deriv = 0.0;
    for (int c = 0; c < grid.cells(); ++c) {
        if (c == skip) continue;
        for (int i = cell_offset_[c]; i < cell_offset_[c + 1]; ++i) {
            const Node& n = nodes_[i];
            if (n.weight == 0.0) continue;
            value += kernel_.eval(x - n.y) * n.weight;
            deriv += kernel_.deriv(x - n.y) * n.weight;
        }
    }
    for (const Node& n : local) {
        value += kernel_.eval(x - n.y) * n.weight;
        deriv += kernel_.deriv(x - n.y) * n.weight;
    }
    return {value, deriv};
}

double reconstruct_T2(const GridFunction& u, const KernelModel& kernel, const FiringRateModel& firing, double x) {
    return Reconstruction(u, kernel, firing).value(x);
}

CorrectionData::CorrectionData(const KernelModel& kernel, std::vector<double> crossings, std::vector<double> margins)
    : kernel_(kernel), crossings_(std::move(crossings)), margins_(std::move(margins)) {
    const auto n = static_cast<long>(crossings_.size());
    S_.resize(n, n);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) {
            S_(i, j) = (kernel_.eval(crossings_[i] - crossings_[j]) + kernel_.eval(crossings_[i] + crossings_[j])) /
                       margins_[j];
        }
    }
    const Eigen::MatrixXd shifted = S_ - Eigen::MatrixXd::Identity(n, n);
    lu_.compute(shifted);
    det_ = lu_.determinant();
}

Eigen::VectorXd CorrectionData::s(double x) const {
    const auto n = static_cast<long>(crossings_.size());
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) {
        v(i) = (kernel_.eval(x - crossings_[i]) + kernel_.eval(x + crossings_[i])) / margins_[i];
    }
    return v;
}

Eigen::VectorXd CorrectionData::s_deriv(double x) const {
    const auto n = static_cast<long>(crossings_.size());
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) {
        v(i) = (kernel_.deriv(x - crossings_[i]) + kernel_.deriv(x + crossings_[i])) / margins_[i];
    }
    return v;
}

Eigen::MatrixXd CorrectionData::symmetrized() const {
    const auto n = static_cast<long>(crossings_.size());
    Eigen::VectorXd root(n);
    for (long i = 0; i < n; ++i) root(i) = std::sqrt(margins_[i]);
    // S = K C⁻¹ with K symmetric, so C^{-1/2} S C^{1/2} = C^{-1/2} K C^{-1/2}.
    return root.cwiseInverse().asDiagonal() * S_ * root.asDiagonal();
}

Eigen::VectorXd CorrectionData::eigenvalues() const {
    const Eigen::MatrixXd sym = symmetrized();
    const Eigen::MatrixXd half = 0.5 * (sym + sym.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(half, Eigen::EigenvaluesOnly).eigenvalues();
}

CorrectionData build_correction(const LimitBump& bump) {
    for (double m : bump.margins()) {
        if (!(m > 0)) fail(ErrorCode::NotRegular, "correction data needs a regular limit bump");
    }
    const auto a = bump.crossings().values();
    CorrectionData data(bump.kernel(), std::vector<double>(a.begin(), a.end()), bump.margins());
    if (!(std::abs(data.det_) > 1e-12)) {
        fail(ErrorCode::SingularMatrix, "S - I is singular (det = " + std::to_string(data.det_) + ")");
    }
    return data;
}

}  // namespace bumpforge
