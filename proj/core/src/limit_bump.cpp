#include "bumpforge/limit_bump.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "bumpforge/errors.hpp"
#include "bumpforge/verification.hpp"

namespace bumpforge {

namespace {

// (−1)^n for integer n.
double alt(long n) { return (n % 2 == 0) ? 1.0 : -1.0; }

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::string describe(std::span<const double> a) {
    std::ostringstream os;
    os.precision(10);
    os << "(";
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? ", " : "") << a[i];
    os << ")";
    return os.str();
}

}  // namespace

CrossingVector::CrossingVector(std::vector<double> a) : a_(std::move(a)) {
    if (a_.empty()) fail(ErrorCode::InvalidParameter, "crossing vector must be non-empty");
    if (!is_admissible(a_)) {
        fail(ErrorCode::InvalidParameter, "crossings must be positive and strictly increasing: " + describe(a_));
    }
}

bool CrossingVector::is_admissible(std::span<const double> a) noexcept {
    if (a.empty() || !(a[0] > 0.0) || !std::isfinite(a[0])) return false;
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (!(a[i] > a[i - 1]) || !std::isfinite(a[i])) return false;
    }
    return true;
}

std::vector<double> CrossingVector::symmetric_crossings() const {
    std::vector<double> b;
    b.reserve(2 * a_.size());
    for (auto it = a_.rbegin(); it != a_.rend(); ++it) b.push_back(-*it);
    b.insert(b.end(), a_.begin(), a_.end());
    return b;
}

double eval_u_infinity(const KernelModel& kernel, std::span<const double> a, double x) {
    const long n = static_cast<long>(a.size());
    double sum = 0.0;
    for (long k = 1; k <= n; ++k) {
        const double ak = a[k - 1];
        sum += alt(n - k + 1) * (kernel.antideriv(x - ak) - kernel.antideriv(x + ak));
    }
    return sum;
}

double eval_u_infinity_deriv(const KernelModel& kernel, std::span<const double> a, double x) {
    const long n = static_cast<long>(a.size());
    double sum = 0.0;
    for (long k = 1; k <= n; ++k) {
        const double ak = a[k - 1];
        sum += alt(n - k + 1) * (kernel.eval(x - ak) - kernel.eval(x + ak));
    }
    return sum;
}

std::vector<double> crossing_margins(const KernelModel& kernel, std::span<const double> a) {
    const long n = static_cast<long>(a.size());
    std::vector<double> m(a.size());
    for (long i = 1; i <= n; ++i) {
        double sum = 0.0;
        for (long k = 1; k <= n; ++k) {
            sum += alt(k + i) * (kernel.eval(a[i - 1] - a[k - 1]) - kernel.eval(a[i - 1] + a[k - 1]));
        }
        m[i - 1] = sum;
    }
    return m;
}

Eigen::VectorXd residual_G(std::span<const double> a, const KernelModel& kernel, double h) {
    const long n = static_cast<long>(a.size());
    Eigen::VectorXd g(n);
    for (long i = 1; i <= n; ++i) {
        g(i - 1) = alt(n + i + 1) * (eval_u_infinity(kernel, a, a[i - 1]) - h);
    }
    return g;
}

Eigen::MatrixXd jacobian_J(std::span<const double> a, const KernelModel& kernel, double /*h*/) {
    const long n = static_cast<long>(a.size());
    const std::vector<double> m = crossing_margins(kernel, a);
    const double w0 = kernel.eval(0.0);
    Eigen::MatrixXd J(n, n);
    for (long i = 1; i <= n; ++i) {
        const double ai = a[i - 1];
        for (long j = 1; j <= n; ++j) {
            const double aj = a[j - 1];
            if (i == j) {
                J(i - 1, j - 1) = m[i - 1] - w0 - kernel.eval(2.0 * ai);
            } else {
                J(i - 1, j - 1) = alt(i + j + 1) * (kernel.eval(ai - aj) + kernel.eval(ai + aj));
            }
        }
    }
    return J;
}

LimitBump::LimitBump(const KernelModel& kernel, double h, CrossingVector crossings)
    : kernel_(kernel), h_(h), crossings_(std::move(crossings)) {
    margins_ = crossing_margins(kernel_, crossings_.values());
    jacobian_ = jacobian_J(crossings_.values(), kernel_, h_);
    jacobian_det_ = jacobian_.determinant();
    residual_norm_ = inf_norm(residual_G(crossings_.values(), kernel_, h_));
}

LimitBump LimitBump::at(const KernelModel& kernel, double h, CrossingVector crossings) {
    if (!(h > 0)) fail(ErrorCode::InvalidParameter, "threshold h must be positive");
    return LimitBump(kernel, h, std::move(crossings));
}

LimitBump solve_crossings(const KernelModel& kernel, double h, std::size_t n,
                          std::span<const double> initial_guess, const NewtonOptions& options) {
    if (!(h > 0)) fail(ErrorCode::InvalidParameter, "threshold h must be positive");
    if (initial_guess.size() != n) {
        fail(ErrorCode::InvalidParameter, "initial guess must have N entries");
    }
    if (!CrossingVector::is_admissible(initial_guess)) {
        fail(ErrorCode::InvalidParameter,
             "initial guess must be positive and strictly increasing: " + describe(initial_guess));
    }

    std::vector<double> a(initial_guess.begin(), initial_guess.end());
    Eigen::VectorXd g = residual_G(a, kernel, h);
    double g_norm = inf_norm(g);
    double last_step = std::numeric_limits<double>::infinity();
    int iterations = 0;

    while (!(g_norm <= options.residual_tol && last_step <= options.step_tol)) {
        if (iterations >= options.max_iterations) {
            fail(ErrorCode::NoConvergence, "Newton on the crossing equations did not converge from " +
                                               describe(initial_guess) + "; |G| = " + std::to_string(g_norm));
        }
        ++iterations;

        const Eigen::MatrixXd J = jacobian_J(a, kernel, h);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) {
            // Singular at an intermediate iterate is a Newton failure, not a
            // statement about the root.
            fail(ErrorCode::NoConvergence, "crossing Jacobian became singular at iterate " + describe(a));
        }
        const Eigen::VectorXd delta = lu.solve(-g);

        // Backtracking: halve until ordering holds and |G| decreases. Once at
        // round-off level the full step is taken.
        double lambda = 1.0;
        std::vector<double> trial(a.size());
        Eigen::VectorXd trial_g;
        bool accepted = false;
        for (int halving = 0; halving <= options.max_halvings; ++halving, lambda *= 0.5) {
            for (std::size_t i = 0; i < a.size(); ++i) trial[i] = a[i] + lambda * delta(static_cast<long>(i));
            if (!CrossingVector::is_admissible(trial)) continue;
            trial_g = residual_G(trial, kernel, h);
            const double trial_norm = inf_norm(trial_g);
            if (trial_norm < g_norm || g_norm <= options.residual_tol) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            fail(ErrorCode::NoConvergence, "Newton line search stalled at " + describe(a) +
                                               "; |G| = " + std::to_string(g_norm));
        }
        last_step = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) last_step = std::max(last_step, std::abs(trial[i] - a[i]));
        a = trial;
        g = trial_g;
        g_norm = inf_norm(g);
    }

    LimitBump bump(kernel, h, CrossingVector(a));
    bump.newton_iterations_ = iterations;

    for (std::size_t i = 0; i < bump.margins().size(); ++i) {
        if (!(bump.margins()[i] > options.margin_tol)) {
            fail(ErrorCode::NotRegular, "crossing " + std::to_string(i + 1) + " of " + describe(a) +
                                            " has margin " + std::to_string(bump.margins()[i]));
        }
    }
    if (!(std::abs(bump.jacobian_det()) > options.det_tol)) {
        fail(ErrorCode::SingularJacobian, "det J = " + std::to_string(bump.jacobian_det()) + " at " + describe(a));
    }

    if (options.classify) {
        const double search = a.back() + 1.0;
        const double decay = std::max(a.back() + 30.0, kernel.tail_radius(1e-12) + a.back());
        const auto cls = classify_bump(
            [&bump](double x) { return Sample{bump.value(x), bump.slope(x)}; }, h, search, decay);
        if (!cls.is_bump || cls.crossings_found.size() != 2 * n) {
            fail(ErrorCode::NotABump, "profile built from " + describe(a) + " is not an N-bump");
        }
    }
    return bump;
}

LimitAssumptionReport verify_limit_assumptions(const LimitBump& bump, double margin_tol, double det_tol) {
    LimitAssumptionReport report;
    report.margins = bump.margins();
    report.regular = std::all_of(report.margins.begin(), report.margins.end(),
                                 [margin_tol](double m) { return m > margin_tol; });
    report.jacobian_det = bump.jacobian_det();
    report.invertible = std::abs(report.jacobian_det) > det_tol;
    if (const auto* e = std::get_if<Exponential>(&bump.kernel().family())) {
        report.homoclinic_bound = 1.0 / std::sqrt(2.0 * bump.h());
        report.homoclinic_ok = e->k < *report.homoclinic_bound;
    }
    return report;
}

namespace {

void enumerate_lattice(std::size_t n, int resolution, std::vector<int>& index, std::size_t pos,
                       const std::function<void(const std::vector<int>&)>& visit) {
    if (pos == n) {
        visit(index);
        return;
    }
    const int start = pos == 0 ? 1 : index[pos - 1] + 1;
    for (int i = start; i <= resolution; ++i) {
        index[pos] = i;
        enumerate_lattice(n, resolution, index, pos + 1, visit);
    }
}

}  // namespace

std::vector<CrossingVector> scan_initial_guesses(const KernelModel& kernel, double h, std::size_t n,
                                                 double a_max, int resolution, double threshold) {
    if (n == 0 || !(a_max > 0) || resolution < static_cast<int>(n)) {
        fail(ErrorCode::InvalidParameter, "scan requires N >= 1, a_max > 0 and resolution >= N");
    }
    const double step = a_max / resolution;
    auto norm_at = [&](const std::vector<int>& idx) {
        std::vector<double> a(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) a[i] = idx[i] * step;
        return inf_norm(residual_G(a, kernel, h));
    };

    std::vector<CrossingVector> found;
    std::vector<int> index(n);
    enumerate_lattice(n, resolution, index, 0, [&](const std::vector<int>& idx) {
        const double centre = norm_at(idx);
        if (!(centre < threshold)) return;
        // Local minimum over admissible axis neighbours.
        for (std::size_t i = 0; i < n; ++i) {
            for (int d : {-1, 1}) {
                std::vector<int> nb = idx;
                nb[i] += d;
                if (nb[i] < 1 || nb[i] > resolution) continue;
                if ((i > 0 && nb[i] <= nb[i - 1]) || (i + 1 < n && nb[i] >= nb[i + 1])) continue;
                if (norm_at(nb) < centre) return;
            }
        }
        std::vector<double> guess(n);
        for (std::size_t i = 0; i < n; ++i) guess[i] = idx[i] * step;
        try {
            const LimitBump bump = solve_crossings(kernel, h, n, guess);
            const auto a = bump.crossings().values();
            const bool duplicate = std::any_of(found.begin(), found.end(), [&](const CrossingVector& c) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (std::abs(c[i] - a[i]) > 1e-8) return false;
                }
                return true;
            });
            if (!duplicate) found.emplace_back(std::vector<double>(a.begin(), a.end()));
        } catch (const BumpError&) {
            // Not every lattice minimum seeds a regular bump.
        }
    });
    std::sort(found.begin(), found.end(), [](const CrossingVector& l, const CrossingVector& r) {
        return std::lexicographical_compare(l.values().begin(), l.values().end(), r.values().begin(),
                                            r.values().end());
    });
    return found;
}

}  // namespace bumpforge
