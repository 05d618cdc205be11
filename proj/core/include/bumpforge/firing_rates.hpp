#pragma once

#include <limits>
#include <string>
#include <vector>

namespace bumpforge {

enum class FiringFamily {
    Hill,      ///< S(z) = z^p / (z^p + 1) for z = β(t - h) ≥ 0, zero below threshold
    Logistic,  ///< S(z) = 1 / (1 + e^{-z}); positive below threshold
    Step,      ///< χ_[h, ∞)
};

inline constexpr double infinite_beta = std::numeric_limits<double>::infinity();

std::string to_string(FiringFamily family);

/// Sigmoid firing rate f_β(t) = S(β(t - h)) or its unit-step limit.
class FiringRateModel {
public:
    FiringFamily family() const noexcept { return family_; }
    double beta() const noexcept { return beta_; }
    double h() const noexcept { return h_; }
    double p() const noexcept { return p_; }

    bool is_step() const noexcept { return family_ == FiringFamily::Step; }
    /// f vanishes identically below the threshold.
    bool has_threshold_support() const noexcept { return family_ != FiringFamily::Logistic; }

    double eval(double t) const noexcept;
    double operator()(double t) const noexcept { return eval(t); }

    /// f′_β(t); throws NotApplicable for the step family.
    double deriv(double t) const;

    /// Same family and threshold with a different steepness.
    FiringRateModel with_beta(double beta) const;

private:
    friend FiringRateModel make_firing_rate(FiringFamily, double, double, double);
    FiringRateModel(FiringFamily family, double beta, double h, double p)
        : family_(family), beta_(beta), h_(h), p_(p) {}

    FiringFamily family_;
    double beta_;
    double h_;
    double p_;
};

/// Builds a firing-rate model. β = ∞ yields the step family regardless of
/// `family`. Throws InvalidParameter for h ≤ 0, β ≤ 0, or p ≤ 1 (Hill).
FiringRateModel make_firing_rate(FiringFamily family, double beta, double h, double p = 2.0);

struct FiringAssumptionReport {
    bool bounded = false;   ///< 0 ≤ f ≤ 1 on the sample grid
    bool monotone = false;
    bool support = false;   ///< f = 0 below h
    double xi = 0.0;
    /// C_β(ξ) = sup_{t > h + ξ} |f′_β(t)| estimated at β, 2β, 4β.
    std::vector<double> betas;
    std::vector<double> decay_constants;
    bool decay_decreasing = false;

    bool passed() const noexcept { return bounded && monotone && support && decay_decreasing; }
};

/// Throws NotApplicable for the step family.
FiringAssumptionReport check_firing_assumptions(const FiringRateModel& model, double xi);

}  // namespace bumpforge
