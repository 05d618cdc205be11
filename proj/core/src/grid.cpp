#include "bumpforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "bumpforge/errors.hpp"

namespace bumpforge {

Grid::Grid(double half_width, int points) : d_(half_width), m_(points) {
    if (!(d_ > 0) || !std::isfinite(d_)) fail(ErrorCode::InvalidParameter, "grid half-width must be positive");
    if (m_ < 65 || m_ % 2 == 0) fail(ErrorCode::InvalidParameter, "grid point count must be odd and >= 65");
}

std::vector<double> Grid::nodes() const {
    std::vector<double> x(m_);
    for (int j = 0; j < m_; ++j) x[j] = node(j);
    return x;
}

int Grid::cell_of(double x) const noexcept {
    const int c = static_cast<int>(std::floor((x + d_) / spacing()));
    return std::clamp(c, 0, m_ - 2);
}

GridFunction::GridFunction(Grid grid, std::vector<double> values, std::vector<double> derivs, bool even)
    : grid_(grid), values_(std::move(values)), derivs_(std::move(derivs)), even_(even) {
    const auto m = static_cast<std::size_t>(grid_.size());
    if (values_.size() != m || derivs_.size() != m) {
        fail(ErrorCode::InvalidParameter, "grid function length does not match its grid");
    }
}

GridFunction GridFunction::zeros(const Grid& grid, bool even) {
    const auto m = static_cast<std::size_t>(grid.size());
    return GridFunction(grid, std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), even);
}

GridFunction GridFunction::sample(const Grid& grid, const Sampler& f, bool even) {
    const auto m = static_cast<std::size_t>(grid.size());
    std::vector<double> v(m), dv(m);
    for (int j = 0; j < grid.size(); ++j) {
        const Sample s = f(grid.node(j));
        v[j] = s.u;
        dv[j] = s.du;
    }
    return GridFunction(grid, std::move(v), std::move(dv), even);
}

Sample GridFunction::interpolate_in_cell(int c, double x) const noexcept {
    const double h = grid_.spacing();
    const double x0 = grid_.node(c);
    const double t = (x - x0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double y0 = values_[c];
    const double y1 = values_[c + 1];
    const double d0 = derivs_[c] * h;
    const double d1 = derivs_[c + 1] * h;
    const double u = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
    const double du = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * d0 + (-6 * t2 + 6 * t) * y1 +
                       (3 * t2 - 2 * t) * d1) /
                      h;
    return {u, du};
}

Sample GridFunction::interpolate(double x) const {
    if (!grid_.contains(x)) {
        fail(ErrorCode::InvalidParameter, "interpolation point " + std::to_string(x) + " outside [-d, d]");
    }
    return interpolate_in_cell(grid_.cell_of(x), x);
}

double GridFunction::symmetry_defect() const noexcept {
    const int m = grid_.size();
    double dv = 0.0;
    double dd = 0.0;
    for (int j = 0; j < m; ++j) {
        dv = std::max(dv, std::abs(values_[j] - values_[m - 1 - j]));
        dd = std::max(dd, std::abs(derivs_[j] + derivs_[m - 1 - j]));
    }
    return dv + dd;
}

void GridFunction::symmetrize() noexcept {
    const int m = grid_.size();
    for (int j = 0; j < m / 2; ++j) {
        const int r = m - 1 - j;
        const double v = 0.5 * (values_[j] + values_[r]);
        const double d = 0.5 * (derivs_[j] - derivs_[r]);
        values_[j] = values_[r] = v;
        derivs_[j] = d;
        derivs_[r] = -d;
    }
    derivs_[m / 2] = 0.0;
    even_ = true;
}

double c1_norm(const GridFunction& u) {
    double mv = 0.0;
    double md = 0.0;
    for (double v : u.values()) mv = std::max(mv, std::abs(v));
    for (double d : u.derivs()) md = std::max(md, std::abs(d));
    return mv + md;
}

double c1_distance(const GridFunction& u, const GridFunction& v) {
    if (!(u.grid() == v.grid())) fail(ErrorCode::InvalidParameter, "C1 distance needs a common grid");
    double mv = 0.0;
    double md = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        mv = std::max(mv, std::abs(u.values()[j] - v.values()[j]));
        md = std::max(md, std::abs(u.derivs()[j] - v.derivs()[j]));
    }
    return mv + md;
}

void write_csv(std::ostream& os, const GridFunction& u) {
    os << "x,u,uprime\n";
    char line[96];
    for (int j = 0; j < u.grid().size(); ++j) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", u.grid().node(j), u.values()[j], u.derivs()[j]);
        os << line;
    }
}

GridFunction read_csv(std::istream& is, bool even) {
    std::string line;
    if (!std::getline(is, line)) fail(ErrorCode::DataError, "profile CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,u,uprime") fail(ErrorCode::DataError, "profile CSV header must be 'x,u,uprime'");

    std::vector<double> x, u, du;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        double vals[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(fields, cell, ',')) {
                fail(ErrorCode::DataError, "row " + std::to_string(row) + ": expected 3 columns");
            }
            try {
                std::size_t used = 0;
                vals[c] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                fail(ErrorCode::DataError, "row " + std::to_string(row) + ": malformed number '" + cell + "'");
            }
            if (!std::isfinite(vals[c])) {
                fail(ErrorCode::DataError, "row " + std::to_string(row) + ": non-finite value");
            }
        }
        if (std::getline(fields, cell, ',')) {
            fail(ErrorCode::DataError, "row " + std::to_string(row) + ": expected 3 columns");
        }
        x.push_back(vals[0]);
        u.push_back(vals[1]);
        du.push_back(vals[2]);
    }
    const int m = static_cast<int>(x.size());
    if (m < 65 || m % 2 == 0) fail(ErrorCode::DataError, "profile must have an odd number (>= 65) of rows");
    const double d = x.back();
    if (!(d > 0) || std::abs(x.front() + d) > 1e-12 * d) {
        fail(ErrorCode::DataError, "profile nodes must span a symmetric interval [-d, d]");
    }
    Grid grid(d, m);
    for (int j = 0; j < m; ++j) {
        if (std::abs(x[j] - grid.node(j)) > 1e-9 * d) {
            fail(ErrorCode::DataError, "profile nodes are not uniformly spaced (row " + std::to_string(j + 2) + ")");
        }
    }
    return GridFunction(grid, std::move(u), std::move(du), even);
}

}  // namespace bumpforge
