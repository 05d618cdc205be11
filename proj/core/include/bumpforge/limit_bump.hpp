#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "bumpforge/kernels.hpp"

namespace bumpforge {

/// Positive half 0 < a₁ < … < a_N of the threshold crossings of a symmetric
/// N-bump; the full crossing set is ±a_i.
class CrossingVector {
public:
    /// Throws InvalidParameter unless the entries are positive and strictly increasing.
    explicit CrossingVector(std::vector<double> a);

    std::size_t size() const noexcept { return a_.size(); }
    double operator[](std::size_t i) const { return a_[i]; }
    std::span<const double> values() const noexcept { return a_; }
    double outermost() const noexcept { return a_.back(); }

    /// Symmetric crossing list −a_N, …, −a₁, a₁, …, a_N.
    std::vector<double> symmetric_crossings() const;

    static bool is_admissible(std::span<const double> a) noexcept;

private:
    std::vector<double> a_;
};

/// u_∞(x) = Σ_k (−1)^{N−k+1} (W(x − a_k) − W(x + a_k)).
double eval_u_infinity(const KernelModel& kernel, std::span<const double> a, double x);
double eval_u_infinity_deriv(const KernelModel& kernel, std::span<const double> a, double x);

/// Oriented slopes Σ_k (−1)^{k+i} (ω(a_i − a_k) − ω(a_i + a_k)); for a
/// genuine N-bump these equal |u′_∞(a_i)| and are positive.
std::vector<double> crossing_margins(const KernelModel& kernel, std::span<const double> a);

/// g_i = (−1)^{N+i+1} (u_∞(a_i) − h). The extra (−1)^N makes jacobian_J the
/// exact derivative of this map for every N.
Eigen::VectorXd residual_G(std::span<const double> a, const KernelModel& kernel, double h);

/// ∂g_i/∂a_i = m_i − ω(0) − ω(2a_i);  ∂g_i/∂a_j = (−1)^{i+j+1} (ω(a_i − a_j) + ω(a_i + a_j)).
Eigen::MatrixXd jacobian_J(std::span<const double> a, const KernelModel& kernel, double h);

struct NewtonOptions {
    int max_iterations = 100;
    double residual_tol = 1e-10;
    double step_tol = 1e-12;
    int max_halvings = 30;
    double margin_tol = 1e-8;
    double det_tol = 1e-10;
    /// Run the post-hoc bump classification on the solved profile.
    bool classify = true;
};

/// The β = ∞ bump built from a crossing vector, with its regularity data.
class LimitBump {
public:
    /// Evaluates margins and Jacobian at the given crossings without solving.
    static LimitBump at(const KernelModel& kernel, double h, CrossingVector crossings);

    const CrossingVector& crossings() const noexcept { return crossings_; }
    const KernelModel& kernel() const noexcept { return kernel_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return crossings_.size(); }

    const std::vector<double>& margins() const noexcept { return margins_; }
    const Eigen::MatrixXd& jacobian() const noexcept { return jacobian_; }
    double jacobian_det() const noexcept { return jacobian_det_; }
    double residual_norm() const noexcept { return residual_norm_; }
    int newton_iterations() const noexcept { return newton_iterations_; }

    double value(double x) const { return eval_u_infinity(kernel_, crossings_.values(), x); }
    double slope(double x) const { return eval_u_infinity_deriv(kernel_, crossings_.values(), x); }

private:
    friend LimitBump solve_crossings(const KernelModel&, double, std::size_t, std::span<const double>,
                                     const NewtonOptions&);
    LimitBump(const KernelModel& kernel, double h, CrossingVector crossings);

    KernelModel kernel_;
    double h_;
    CrossingVector crossings_;
    std::vector<double> margins_;
    Eigen::MatrixXd jacobian_;
    double jacobian_det_ = 0.0;
    double residual_norm_ = 0.0;
    int newton_iterations_ = 0;
};


/// Damped Newton on G(a) = 0. Throws NoConvergence, NotRegular,
/// SingularJacobian or NotABump.
LimitBump solve_crossings(const KernelModel& kernel, double h, std::size_t n,
                          std::span<const double> initial_guess, const NewtonOptions& options = {});

struct LimitAssumptionReport {
    std::vector<double> margins;
    bool regular = false;
    double jacobian_det = 0.0;
    bool invertible = false;
    /// Only for the exponential kernel: a homoclinic orbit needs k < 1/√(2h).
    std::optional<double> homoclinic_bound;
    std::optional<bool> homoclinic_ok;

    bool passed() const noexcept { return regular && invertible && homoclinic_ok.value_or(true); }
};

LimitAssumptionReport verify_limit_assumptions(const LimitBump& bump, double margin_tol = 1e-8,
                                               double det_tol = 1e-10);

/// Coarse exploration helper: lattice points of ordered crossing tuples in
/// (0, a_max] where ‖G‖_∞ has a local minimum below `threshold`, each
/// polished by Newton. Duplicates are merged.
std::vector<CrossingVector> scan_initial_guesses(const KernelModel& kernel, double h, std::size_t n,
                                                 double a_max, int resolution = 64,
                                                 double threshold = 0.05);

}  // namespace bumpforge
