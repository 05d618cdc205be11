#include "bumpforge/refinement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace bumpforge {

namespace {

Eigen::VectorXd values_at(const GridFunction& f, std::span<const double> points) {
    Eigen::VectorXd v(static_cast<long>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) v(static_cast<long>(i)) = f.interpolate(points[i]).u;
    return v;
}

GridFunction difference(const GridFunction& a, const GridFunction& b) {
    std::vector<double> v(a.size()), d(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        v[j] = a.values()[j] - b.values()[j];
        d[j] = a.derivs()[j] - b.derivs()[j];
    }
    return GridFunction(a.grid(), std::move(v), std::move(d), a.even() && b.even());
}

bool all_finite(const GridFunction& f) {
    auto finite = [](double x) { return std::isfinite(x); };
    return std::all_of(f.values().begin(), f.values().end(), finite) &&
           std::all_of(f.derivs().begin(), f.derivs().end(), finite);
}

}  // namespace

Grid default_grid(const LimitBump& bump, int points, double delta) {
    if (!(delta > 0)) fail(ErrorCode::InvalidParameter, "grid delta must be positive");
    return Grid(bump.crossings().outermost() + delta, points);
}

RefinementState initial_state(const LimitBump& bump, const Grid& grid) {
    RefinementState state{
        .n = 0,
        .U = GridFunction::sample(grid, [&bump](double x) { return Sample{bump.value(x), bump.slope(x)}; }, true),
        .error_history = {},
    };
    state.U.symmetrize();
    return state;
}

double relative_residual(const GridFunction& u, const KernelModel& kernel, const FiringRateModel& firing,
                         const QuadratureOptions& quadrature) {
    const GridFunction hu = apply_H_beta(u, kernel, firing, quadrature);
    return c1_norm(difference(u, hu)) / c1_norm(u);
}

RefinementState iterate_once(const RefinementState& state, const LimitBump& bump, const CorrectionData& correction,
                             const FiringRateModel& firing, const RefinementConfig& config) {
    const KernelModel& kernel = bump.kernel();
    const GridFunction& u = state.U;
    const Grid& grid = u.grid();
    const auto a = bump.crossings().values();

    const GridFunction hu = apply_H_beta(u, kernel, firing, config.quadrature);

    Eigen::VectorXd p(static_cast<long>(a.size()));
    if (config.exact_pn) {
        const Reconstruction t2(u, kernel, firing, config.quadrature.order);
        for (std::size_t i = 0; i < a.size(); ++i) p(static_cast<long>(i)) = t2.value(a[i]) - u.interpolate(a[i]).u;
    } else {
        p = values_at(hu, a) - values_at(u, a);
    }

    std::vector<double> next(u.size()), next_d(u.size());
    if (config.form == SchemeForm::Direct) {
        const Eigen::VectorXd q = correction.solve(p);
        for (int j = 0; j < grid.size(); ++j) {
            const double x = grid.node(j);
            next[j] = hu.values()[j] - correction.s(x).dot(q);
            next_d[j] = hu.derivs()[j] - correction.s_deriv(x).dot(q);
        }
    } else {
        // (I − S)⁻¹ w = −(S − I)⁻¹ w
        const Eigen::VectorXd w_at = -p;
        const Eigen::VectorXd inv = -correction.solve(w_at);
        for (int j = 0; j < grid.size(); ++j) {
            const double x = grid.node(j);
            const double w = u.values()[j] - hu.values()[j];
            const double dw = u.derivs()[j] - hu.derivs()[j];
            next[j] = u.values()[j] - (w + correction.s(x).dot(inv));
            next_d[j] = u.derivs()[j] - (dw + correction.s_deriv(x).dot(inv));
        }
    }

    RefinementState out{
        .n = state.n + 1,
        .U = GridFunction(grid, std::move(next), std::move(next_d), u.even()),
        .error_history = state.error_history,
        .converged = false,
        .residual = std::numeric_limits<double>::quiet_NaN(),
        .growth_streak = state.growth_streak,
    };
    if (out.U.even()) out.U.symmetrize();

    const double error = c1_distance(out.U, u) / c1_norm(u);
    out.error_history.push_back(error);
    if (!std::isfinite(error) || !all_finite(out.U)) {
        throw RefinementFailure(ErrorCode::DivergenceDetected,
                                "iterate " + std::to_string(out.n) + " is not finite", out);
    }
    // Any fixed point satisfies ‖U‖_∞ ≤ ‖ω‖_{L¹}; an iterate far outside that ball has lost the bump.
    const double bound = 100.0 * kernel.l1_norm();
    const auto vals = out.U.values();
    const double sup = std::abs(*std::max_element(vals.begin(), vals.end(), [](double x, double y) {
        return std::abs(x) < std::abs(y);
    }));
    if (sup > bound) {
        std::ostringstream os;
        os << "iterate " << out.n << " has sup norm " << sup << ", beyond 100 ||omega||_L1 = " << bound;
        throw RefinementFailure(ErrorCode::DivergenceDetected, os.str(), out);
    }
    if (state.error_history.empty()) {
        out.growth_streak = 0;
    } else {
        out.growth_streak = error > 10.0 * state.error_history.back() ? state.growth_streak + 1 : 0;
    }
    if (out.growth_streak >= 3) {
        std::ostringstream os;
        os << "relative error grew more than tenfold for 3 consecutive steps (error " << error << " at n = " << out.n
           << ")";
        throw RefinementFailure(ErrorCode::DivergenceDetected, os.str(), out);
    }
    return out;
}

RefinementResult run_refinement(const LimitBump& bump, const FiringRateModel& firing, const RefinementConfig& config) {
    if (firing.is_step()) fail(ErrorCode::InvalidParameter, "refinement needs a finite beta");
    if (!(config.tol > 0) || config.max_iters < 1) {
        fail(ErrorCode::InvalidParameter, "refinement needs tol > 0 and max_iters >= 1");
    }
    const CorrectionData correction = build_correction(bump);
    RefinementState state = initial_state(bump, config.grid);

    try {
        while (state.n < config.max_iters) {
            state = iterate_once(state, bump, correction, firing, config);
            if (state.error_history.back() <= config.tol) {
                state.residual = relative_residual(state.U, bump.kernel(), firing, config.quadrature);
                if (state.residual <= config.residual_factor * config.tol) {
                    state.converged = true;
                    break;
                }
            }
        }
    } catch (const RefinementFailure&) {
        throw;
    } catch (const BumpError& e) {
        throw RefinementFailure(e.code(), e.what(), state);
    }

    if (!state.converged) {
        std::ostringstream os;
        os << "no convergence after " << state.n << " iterations (last relative error "
           << (state.error_history.empty() ? NAN : state.error_history.back()) << ", tol " << config.tol << ")";
        throw RefinementFailure(ErrorCode::NoConvergence, os.str(), state);
    }
    GridFunction u = state.U;
    Reconstruction recon(u, bump.kernel(), firing, config.quadrature.order);
    return RefinementResult{std::move(u), std::move(state), std::move(recon)};
}

std::vector<SweepRow> sweep_beta(const LimitBump& bump, const FiringRateModel& firing, std::span<const double> betas,
                                 const RefinementConfig& config, unsigned threads) {
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!std::isfinite(betas[i]) || !(betas[i] > 0) || (i > 0 && !(betas[i] > betas[i - 1]))) {
            fail(ErrorCode::InvalidParameter, "sweep betas must be finite, positive and strictly increasing");
        }
    }
    std::vector<SweepRow> rows(betas.size());
    if (betas.empty()) return rows;

    const GridFunction u_inf = initial_state(bump, config.grid).U;
    auto run_row = [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.beta = betas[i];
        try {
            const FiringRateModel f = firing.with_beta(betas[i]);
            const RefinementResult result = run_refinement(bump, f, config);
            row.c1_distance = c1_distance(result.U, u_inf);
            row.iterations = result.state.n;
        } catch (const RefinementFailure& e) {
            row.iterations = e.state().n;
            row.status = std::string(to_string(e.code()));
        } catch (const BumpError& e) {
            row.status = std::string(to_string(e.code()));
        }
    };

    const unsigned workers = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(betas.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < betas.size(); ++i) run_row(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < betas.size(); i = next++) run_row(i);
        });
    }
    for (auto& t : pool) t.join();
    return rows;
}

}  // namespace bumpforge
