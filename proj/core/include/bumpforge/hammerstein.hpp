#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bumpforge/firing_rates.hpp"
#include "bumpforge/grid.hpp"
#include "bumpforge/kernels.hpp"
#include "bumpforge/limit_bump.hpp"

namespace bumpforge {

/// Composite Gauss–Legendre on the grid cells. Cells in which U crosses the
/// threshold are split at the crossing so the kink of the firing rate never
/// sits inside a panel.
struct QuadratureOptions {
    int order = 4;
    /// Recompute with `verify_order` nodes and compare.
    bool verify = true;
    int verify_order = 8;
    double verify_tol = 1e-7;
    /// Cells are split into up to this many equal panels before giving up.
    int max_subdivisions = 16;
};

/// Restricted operator on [−d, d]:
///   values_j = ∫ ω(x_j − y) f_β(U(y)) dy,  derivs_j = ∫ ω′(x_j − y) f_β(U(y)) dy.
/// Requires a finite β. Throws QuadratureFailure when the verification pass
/// still disagrees by more than verify_tol in sup norm at max_subdivisions.
GridFunction apply_H_beta(const GridFunction& u, const KernelModel& kernel, const FiringRateModel& firing,
                          const QuadratureOptions& options = {});

/// Fréchet derivative S[β, U] v = ∫ ω(x − y) f′_β(U(y)) v(y) dy (and its x-derivative).
GridFunction apply_S_beta(const GridFunction& u, const GridFunction& v, const KernelModel& kernel,
                          const FiringRateModel& firing, const QuadratureOptions& options = {});

/// T₂U: the integral over [−d, d] evaluated at arbitrary x ∈ ℝ. The density
/// f_β(U(y)) is tabulated once at construction; the panel containing x is
/// split at x so the kernel kink is resolved.
class Reconstruction {
public:
    Reconstruction(GridFunction u, KernelModel kernel, FiringRateModel firing, int order = 4);

    Sample operator()(double x) const;
    double value(double x) const { return (*this)(x).u; }

    const GridFunction& restriction() const noexcept { return u_; }

private:
    struct Node {
        double y;
        double weight;  // quadrature weight × density
    };

    void cell_nodes(int cell, std::vector<double> breaks, std::vector<Node>& out) const;

    GridFunction u_;
    KernelModel kernel_;
    FiringRateModel firing_;
    int order_;
    std::vector<Node> nodes_;
    std::vector<int> cell_offset_;  // nodes of cell c are [cell_offset_[c], cell_offset_[c+1])
    std::vector<std::vector<double>> cell_breaks_;
};

double reconstruct_T2(const GridFunction& u, const KernelModel& kernel, const FiringRateModel& firing, double x);

/// Data for the correction term of the successive-approximation scheme:
///   s_i(x) = (ω(x − a_i) + ω(x + a_i)) / m_i,
///   S_ij  = (ω(a_i − a_j) + ω(a_i + a_j)) / m_j,
/// with m_i = |u′_∞(a_i)|, and an LU factorization of S − I.
class CorrectionData {
public:
    std::size_t size() const noexcept { return crossings_.size(); }
    const std::vector<double>& crossings() const noexcept { return crossings_; }
    const std::vector<double>& margins() const noexcept { return margins_; }
    const Eigen::MatrixXd& S() const noexcept { return S_; }
    double det_S_minus_I() const noexcept { return det_; }

    Eigen::VectorXd s(double x) const;
    Eigen::VectorXd s_deriv(double x) const;

    /// q with (S − I) q = p.
    Eigen::VectorXd solve(const Eigen::VectorXd& p) const { return lu_.solve(p); }

    /// Eigenvalues of S via the symmetric similarity C^{−1/2} S C^{1/2},
    /// C = diag(m); sorted ascending.
    Eigen::VectorXd eigenvalues() const;
    /// The similarity-transformed matrix itself (symmetric up to round-off).
    Eigen::MatrixXd symmetrized() const;

private:
    friend CorrectionData build_correction(const LimitBump& bump);
    CorrectionData(const KernelModel& kernel, std::vector<double> crossings, std::vector<double> margins);

    KernelModel kernel_;
    std::vector<double> crossings_;
    std::vector<double> margins_;
    Eigen::MatrixXd S_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double det_ = 0.0;
};

/// Throws SingularMatrix when |det(S − I)| ≤ 1e−12.
CorrectionData build_correction(const LimitBump& bump);

}  // namespace bumpforge
