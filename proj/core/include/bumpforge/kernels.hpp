#pragma once

#include <functional>
#include <string>
#include <variant>

namespace bumpforge {

/// ω(x) = e^{-k|x|} / (2k): Green's function of -u'' + k²u.
struct Exponential {
    double k;
};

/// ω(x) = (1 - |x|) e^{-k|x|}, lateral inhibition.
struct WizardHat {
    double k;
};

/// ω(x) = K e^{-(kx)²} - M e^{-(mx)²} with K > M, k > m.
struct DiffGaussians {
    double K;
    double k;
    double M;
    double m;
};

using KernelFamily = std::variant<Exponential, WizardHat, DiffGaussians>;

/// A symmetric connectivity kernel together with its derivative, its
/// antiderivative W(x) = ∫₀ˣ ω, and norm constants. Immutable once built.
class KernelModel {
public:
    const KernelFamily& family() const noexcept { return family_; }
    std::string name() const;

    double eval(double x) const;
    double operator()(double x) const { return eval(x); }

    /// ω′(x). At kink points (x = 0 for the exponential and wizard-hat
    /// families) returns the mean of the one-sided derivatives, i.e. 0.
    double deriv(double x) const;

    double antideriv(double x) const;

    double l1_norm() const noexcept { return l1_norm_; }
    double sup_norm() const noexcept { return sup_norm_; }
    double deriv_sup_norm() const noexcept { return deriv_sup_norm_; }

    /// Radius beyond which |ω| < tol.
    double tail_radius(double tol) const;

    /// True when ω′ jumps at x = 0.
    bool has_kink_at_origin() const noexcept;

private:
    friend KernelModel make_kernel(const KernelFamily& family);
    explicit KernelModel(KernelFamily family) : family_(family) {}

    KernelFamily family_;
    double l1_norm_ = 0.0;
    double sup_norm_ = 0.0;
    double deriv_sup_norm_ = 0.0;
};

/// Validates shape parameters and builds the model with norm constants.
/// Throws BumpError(InvalidParameter) on non-positive parameters or, for
/// DiffGaussians, when K > M and k > m do not hold.
KernelModel make_kernel(const KernelFamily& family);

inline double antiderivative(const KernelModel& kernel, double x) { return kernel.antideriv(x); }

struct KernelAssumptionReport {
    bool symmetric = false;
    double symmetry_defect = 0.0;
    bool lipschitz = false;
    double lipschitz_estimate = 0.0;
    bool integrable = false;
    double l1_estimate = 0.0;
    bool bounded = false;
    double sup_estimate = 0.0;

    bool passed() const noexcept { return symmetric && lipschitz && integrable && bounded; }
};

struct KernelCheckOptions {
    double half_width = 20.0;
    int samples = 40001;
    double symmetry_tol = 1e-12;
};

/// Samples the kernel hypotheses (symmetry, Lipschitz continuity, L¹ and L∞
/// finiteness). Works on any callable so that counterexamples can be checked.
KernelAssumptionReport check_kernel_assumptions(const std::function<double(double)>& omega,
                                                const KernelCheckOptions& options = {});
KernelAssumptionReport check_kernel_assumptions(const KernelModel& kernel,
                                                const KernelCheckOptions& options = {});

}  // namespace bumpforge
