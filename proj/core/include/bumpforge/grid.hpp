#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "bumpforge/verification.hpp"

namespace bumpforge {

/// Uniform symmetric grid x_j = −d + 2dj/(M−1), j = 0..M−1, with M odd so
/// that 0 is a node.
class Grid {
public:
    /// Throws InvalidParameter unless d > 0 and M ≥ 65 is odd.
    Grid(double half_width, int points);

    double half_width() const noexcept { return d_; }
    int size() const noexcept { return m_; }
    int cells() const noexcept { return m_ - 1; }
    double spacing() const noexcept { return 2.0 * d_ / (m_ - 1); }

    /// Exactly antisymmetric: node(M−1−j) == −node(j).
    double node(int j) const noexcept { return d_ * (2.0 * j - (m_ - 1)) / (m_ - 1); }
    std::vector<double> nodes() const;

    /// Cell index c with node(c) ≤ x ≤ node(c+1), clamped to [0, M−2].
    int cell_of(double x) const noexcept;
    bool contains(double x) const noexcept { return x >= -d_ && x <= d_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double d_;
    int m_;
};

/// Values and derivative values of a C¹ function sampled on a Grid, with
/// cubic Hermite interpolation between nodes.
class GridFunction {
public:
    GridFunction(Grid grid, std::vector<double> values, std::vector<double> derivs, bool even);

    static GridFunction zeros(const Grid& grid, bool even = true);
    static GridFunction sample(const Grid& grid, const Sampler& f, bool even);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> derivs() const noexcept { return derivs_; }
    std::vector<double>& mutable_values() noexcept { return values_; }
    std::vector<double>& mutable_derivs() noexcept { return derivs_; }
    bool even() const noexcept { return even_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Hermite interpolation; throws InvalidParameter outside [−d, d].
    Sample interpolate(double x) const;
    Sample operator()(double x) const { return interpolate(x); }
    /// Interpolant restricted to cell c, valid for x in [node(c), node(c+1)].
    Sample interpolate_in_cell(int cell, double x) const noexcept;

    /// max_j |U(x_j) − U(−x_j)| + max_j |U′(x_j) + U′(−x_j)|.
    double symmetry_defect() const noexcept;
    /// Projects onto even functions and sets the even flag.
    void symmetrize() noexcept;

private:
    Grid grid_;
    std::vector<double> values_;
    std::vector<double> derivs_;
    bool even_;
};

/// ‖U‖_{C¹} = max_j |U(x_j)| + max_j |U′(x_j)|.
double c1_norm(const GridFunction& u);
/// ‖U − V‖_{C¹}; both must live on the same grid.
double c1_distance(const GridFunction& u, const GridFunction& v);

/// CSV with header `x,u,uprime` and 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& u);
/// Reads the CSV written by write_csv. The nodes must form a valid Grid;
/// throws DataError otherwise.
GridFunction read_csv(std::istream& is, bool even = false);

}  // namespace bumpforge
