#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bumpforge/errors.hpp"
#include "bumpforge/hammerstein.hpp"
#include "bumpforge/limit_bump.hpp"

namespace bumpforge {

/// Two algebraically equivalent ways of writing one correction step:
///   Direct:          U⁺ = H_β U − sᵀ (S − I)⁻¹ p,  p_i = (H_β U − U)(a_i)
///   InverseOperator: U⁺ = U − v,  v = w + sᵀ (I − S)⁻¹ w(a),  w = U − H_β U
enum class SchemeForm { Direct, InverseOperator };

struct RefinementConfig {
    Grid grid;
    int max_iters = 50;
    /// Bound on the relative C¹ step ‖U_{n+1} − U_n‖ / ‖U_n‖.
    double tol = 1e-10;
    /// Evaluate p_n by quadrature at a_i instead of Hermite interpolation.
    bool exact_pn = false;
    /// Accept convergence only if ‖U − H_β U‖_{C¹}/‖U‖_{C¹} ≤ residual_factor · tol.
    double residual_factor = 100.0;
    SchemeForm form = SchemeForm::Direct;
    QuadratureOptions quadrature{};
};

/// Grid on [−(a_N + delta), a_N + delta].
Grid default_grid(const LimitBump& bump, int points = 1025, double delta = 0.5);

struct RefinementState {
    int n = 0;
    GridFunction U;
    std::vector<double> error_history;
    bool converged = false;
    /// ‖U − H_β U‖_{C¹} / ‖U‖_{C¹} for the current U; NaN until certified.
    double residual = std::numeric_limits<double>::quiet_NaN();
    int growth_streak = 0;
};

/// U₀ = restriction of u_∞ to the grid.
RefinementState initial_state(const LimitBump& bump, const Grid& grid);

/// One correction step. Appends the relative C¹ change to the error
/// history. Throws DivergenceDetected when the error grows more than tenfold
/// three steps in a row, the iterate stops being finite, or its sup norm
/// exceeds 100 ‖ω‖_{L¹}.
RefinementState iterate_once(const RefinementState& state, const LimitBump& bump, const CorrectionData& correction,
                             const FiringRateModel& firing, const RefinementConfig& config);

/// Relative C¹ residual ‖U − H_β U‖ / ‖U‖.
double relative_residual(const GridFunction& u, const KernelModel& kernel, const FiringRateModel& firing,
                         const QuadratureOptions& quadrature = {});

/// Thrown by run_refinement; carries the state reached so far.
class RefinementFailure : public BumpError {
public:
    RefinementFailure(ErrorCode code, const std::string& what, RefinementState state)
        : BumpError(code, what), state_(std::move(state)) {}
    const RefinementState& state() const noexcept { return state_; }

private:
    RefinementState state_;
};

struct RefinementResult {
    GridFunction U;
    RefinementState state;
    /// u_β = T₂U_β on the whole line.
    Reconstruction u_beta;
};

/// Iterates from U₀ until the relative error drops below tol (with the
/// residual certificate) or max_iters is reached. Throws RefinementFailure
/// with NoConvergence or DivergenceDetected.
RefinementResult run_refinement(const LimitBump& bump, const FiringRateModel& firing, const RefinementConfig& config);

struct SweepRow {
    double beta = 0.0;
    std::optional<double> c1_distance;  ///< ‖U_β − U_∞‖_{C¹}; empty on failure
    int iterations = 0;
    std::string status = "ok";
};

/// Runs the refinement for each β (strictly increasing, finite) with the
/// family and threshold of `firing`. Rows may run concurrently on up to
/// `threads` workers; results are returned in β order and a failing row does
/// not stop the sweep.
std::vector<SweepRow> sweep_beta(const LimitBump& bump, const FiringRateModel& firing, std::span<const double> betas,
                                 const RefinementConfig& config, unsigned threads = 1);

}  // namespace bumpforge
