#include "bumpforge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bumpforge/errors.hpp"
#include "bumpforge/numerics.hpp"

namespace bumpforge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double sqrt_pi = 1.7724538509055160273;

double sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

std::string KernelModel::name() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Exponential& e) { os << "exponential(k=" << e.k << ")"; },
                   [&](const WizardHat& w) { os << "wizard_hat(k=" << w.k << ")"; },
                   [&](const DiffGaussians& g) {
                       os << "diff_gaussians(K=" << g.K << ", k=" << g.k << ", M=" << g.M
                          << ", m=" << g.m << ")";
                   },
               },
               family_);
    return os.str();
}

double KernelModel::eval(double x) const {
    return std::visit(overloaded{
                          [x](const Exponential& e) { return std::exp(-e.k * std::abs(x)) / (2.0 * e.k); },
                          [x](const WizardHat& w) {
                              const double ax = std::abs(x);
                              return (1.0 - ax) * std::exp(-w.k * ax);
                          },
                          [x](const DiffGaussians& g) {
                              return g.K * std::exp(-(g.k * x) * (g.k * x)) -
                                     g.M * std::exp(-(g.m * x) * (g.m * x));
                          },
                      },
                      family_);
}

double KernelModel::deriv(double x) const {
    return std::visit(overloaded{
                          [x](const Exponential& e) {
                              return -0.5 * sign(x) * std::exp(-e.k * std::abs(x));
                          },
                          [x](const WizardHat& w) {
                              const double ax = std::abs(x);
                              return -sign(x) * std::exp(-w.k * ax) * (1.0 + w.k * (1.0 - ax));
                          },
                          [x](const DiffGaussians& g) {
                              const double k2 = g.k * g.k;
                              const double m2 = g.m * g.m;
                              return -2.0 * x * (g.K * k2 * std::exp(-k2 * x * x) -
                                                 g.M * m2 * std::exp(-m2 * x * x));
                          },
                      },
                      family_);
}

double KernelModel::antideriv(double x) const {
    return std::visit(overloaded{
                          [x](const Exponential& e) {
                              return sign(x) * (-std::expm1(-e.k * std::abs(x))) / (2.0 * e.k * e.k);
                          },
                          [x](const WizardHat& w) {
                              const double ax = std::abs(x);
                              const double k = w.k;
                              const double ex = std::exp(-k * ax);
                              // ∫₀ˣ e^{-ky} - ∫₀ˣ y e^{-ky}
                              const double first = -std::expm1(-k * ax) / k;
                              const double second = (1.0 - ex * (1.0 + k * ax)) / (k * k);
                              return sign(x) * (first - second);
                          },
                          [x](const DiffGaussians& g) {
                              return g.K * sqrt_pi / (2.0 * g.k) * std::erf(g.k * x) -
                                     g.M * sqrt_pi / (2.0 * g.m) * std::erf(g.m * x);
                          },
                      },
                      family_);
}

double KernelModel::tail_radius(double tol) const {
    return std::visit(overloaded{
                          [tol](const Exponential& e) {
                              return std::max(0.0, std::log(1.0 / (2.0 * e.k * tol)) / e.k);
                          },
                          [tol](const WizardHat& w) {
                              double r = 1.0;
                              while (std::abs(1.0 - r) * std::exp(-w.k * r) >= tol ||
                                     (1.0 + r) * std::exp(-w.k * r) >= tol) {
                                  r *= 1.25;
                              }
                              return r;
                          },
                          [tol](const DiffGaussians& g) {
                              const double amp = std::max(g.K, g.M);
                              return std::sqrt(std::max(0.0, std::log(amp / tol))) / g.m;
                          },
                      },
                      family_);
}

bool KernelModel::has_kink_at_origin() const noexcept {
    return !std::holds_alternative<DiffGaussians>(family_);
}

KernelModel make_kernel(const KernelFamily& family) {
    KernelModel model(family);
    std::visit(
        overloaded{
            [&](const Exponential& e) {
                if (!(e.k > 0) || !std::isfinite(e.k)) {
                    fail(ErrorCode::InvalidParameter, "exponential kernel requires k > 0");
                }
                model.l1_norm_ = 1.0 / (e.k * e.k);
                model.sup_norm_ = 1.0 / (2.0 * e.k);
                model.deriv_sup_norm_ = 0.5;
            },
            [&](const WizardHat& w) {
                if (!(w.k > 0) || !std::isfinite(w.k)) {
                    fail(ErrorCode::InvalidParameter, "wizard-hat kernel requires k > 0");
                }
                // ∫|ω| = 2 (W(1) + ∫₁^∞ (y-1) e^{-ky} dy) = 2 (W(1) + e^{-k}/k²)
                model.l1_norm_ = 2.0 * (model.antideriv(1.0) + std::exp(-w.k) / (w.k * w.k));
                model.sup_norm_ = 1.0;
                model.deriv_sup_norm_ = 1.0 + w.k;
            },
            [&](const DiffGaussians& g) {
                if (!(g.K > 0 && g.k > 0 && g.M > 0 && g.m > 0)) {
                    fail(ErrorCode::InvalidParameter, "diff-of-Gaussians kernel requires K, k, M, m > 0");
                }
                if (!(g.K > g.M && g.k > g.m)) {
                    fail(ErrorCode::InvalidParameter, "diff-of-Gaussians kernel requires K > M and k > m");
                }
                const double k2 = g.k * g.k;
                const double m2 = g.m * g.m;
                // ω changes sign once on (0, ∞).
                const double zero = std::sqrt(std::log(g.K / g.M) / (k2 - m2));
                const double w_inf = g.K * sqrt_pi / (2.0 * g.k) - g.M * sqrt_pi / (2.0 * g.m);
                model.l1_norm_ = 2.0 * (2.0 * model.antideriv(zero) - w_inf);
                const double arg_min = std::sqrt(std::log(k2 * g.K / (m2 * g.M)) / (k2 - m2));
                model.sup_norm_ = std::max(g.K - g.M, std::abs(model.eval(arg_min)));
                const double radius = model.tail_radius(1e-14);
                model.deriv_sup_norm_ =
                    numerics::max_abs([&](double x) { return model.deriv(x); }, 0.0, radius);
            },
        },
        family);
    return model;
}

KernelAssumptionReport check_kernel_assumptions(const std::function<double(double)>& omega,
                                                const KernelCheckOptions& options) {
    KernelAssumptionReport report;
    const double R = options.half_width;
    const int n = options.samples;
    const double h = 2.0 * R / (n - 1);

    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = omega(-R + i * h);
    bool finite = std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });

    double defect = 0.0;
    for (int i = 0; 2 * i < n; ++i) {
        const double x = i * h;
        defect = std::max(defect, std::abs(omega(x) - omega(-x)));
    }
    report.symmetry_defect = defect;
    report.symmetric = finite && defect <= options.symmetry_tol;

    double slope = 0.0;
    for (int i = 0; i + 1 < n; ++i) slope = std::max(slope, std::abs(values[i + 1] - values[i]) / h);
    report.lipschitz_estimate = slope;
    report.lipschitz = finite && std::isfinite(slope);

    report.sup_estimate = numerics::sup_norm(values);
    report.bounded = finite && std::isfinite(report.sup_estimate);

    // Integrability surrogate: the mass in the outer half of the window must be
    // a small fraction of the total.
    auto abs_omega = [&](double x) { return std::abs(omega(x)); };
    const double inner = numerics::adaptive_simpson(abs_omega, -0.5 * R, 0.5 * R, 1e-10);
    const double outer = numerics::adaptive_simpson(abs_omega, -R, -0.5 * R, 1e-10) +
                         numerics::adaptive_simpson(abs_omega, 0.5 * R, R, 1e-10);
    report.l1_estimate = inner + outer;
    report.integrable = std::isfinite(report.l1_estimate) && outer <= 1e-3 * inner;
    return report;
}

KernelAssumptionReport check_kernel_assumptions(const KernelModel& kernel,
                                                const KernelCheckOptions& options) {
    // Slowly decaying kernels need a window that reaches their tail.
    KernelCheckOptions widened = options;
    widened.half_width = std::max(options.half_width, kernel.tail_radius(1e-12));
    return check_kernel_assumptions([&kernel](double x) { return kernel.eval(x); }, widened);
}

}  // namespace bumpforge
