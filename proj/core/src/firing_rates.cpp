#include "bumpforge/firing_rates.hpp"

#include <algorithm>
#include <cmath>

#include "bumpforge/errors.hpp"

namespace bumpforge {

std::string to_string(FiringFamily family) {
    switch (family) {
        case FiringFamily::Hill: return "hill";
        case FiringFamily::Logistic: return "logistic";
        case FiringFamily::Step: return "step";
    }
    return "unknown";
}

double FiringRateModel::eval(double t) const noexcept {
    switch (family_) {
        case FiringFamily::Step:
            return t >= h_ ? 1.0 : 0.0;
        case FiringFamily::Hill: {
            const double z = beta_ * (t - h_);
            if (z <= 0.0) return 0.0;
            if (z < 1.0) {
                const double zp = std::pow(z, p_);
                return zp / (zp + 1.0);
            }
            return 1.0 / (1.0 + std::pow(z, -p_));
        }
        case FiringFamily::Logistic: {
            const double z = beta_ * (t - h_);
            if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
            const double e = std::exp(z);
            return e / (1.0 + e);
        }
    }
    return 0.0;
}

double FiringRateModel::deriv(double t) const {
    switch (family_) {
        case FiringFamily::Step:
            fail(ErrorCode::NotApplicable, "the step firing rate has no pointwise derivative");
        case FiringFamily::Hill: {
            const double z = beta_ * (t - h_);
            if (z <= 0.0) return 0.0;
            if (z < 1.0) {
                const double zp = std::pow(z, p_);
                return beta_ * p_ * std::pow(z, p_ - 1.0) / ((zp + 1.0) * (zp + 1.0));
            }
            const double zm = std::pow(z, -p_);
            return beta_ * p_ * std::pow(z, -p_ - 1.0) / ((1.0 + zm) * (1.0 + zm));
        }
        case FiringFamily::Logistic: {
            const double s = eval(t);
            return beta_ * s * (1.0 - s);
        }
    }
    return 0.0;
}

FiringRateModel FiringRateModel::with_beta(double beta) const {
    const FiringFamily family = family_ == FiringFamily::Step ? FiringFamily::Hill : family_;
    return make_firing_rate(family, beta, h_, p_);
}

FiringRateModel make_firing_rate(FiringFamily family, double beta, double h, double p) {
    if (!(h > 0) || !std::isfinite(h)) fail(ErrorCode::InvalidParameter, "firing threshold h must be positive");
    if (!(beta > 0)) fail(ErrorCode::InvalidParameter, "firing steepness beta must be positive");
    if (std::isinf(beta) || family == FiringFamily::Step) {
        return FiringRateModel(FiringFamily::Step, infinite_beta, h, p);
    }
    if (family == FiringFamily::Hill && !(p > 1)) {
        fail(ErrorCode::InvalidParameter, "Hill firing rate requires p > 1");
    }
    return FiringRateModel(family, beta, h, p);
}

namespace {

double decay_constant(const FiringRateModel& model, double xi) {
    // Sup over (h + ξ, h + 10]; the left endpoint stands in for the limit.
    constexpr int samples = 20000;
    const double lo = model.h() + xi;
    const double step = 10.0 / samples;
    double c = 0.0;
    for (int i = 0; i <= samples; ++i) c = std::max(c, std::abs(model.deriv(lo + i * step)));
    return c;
}

}  // namespace

FiringAssumptionReport check_firing_assumptions(const FiringRateModel& model, double xi) {
    if (model.is_step()) {
        fail(ErrorCode::NotApplicable, "assumption report requires a finite-beta firing rate");
    }
    if (!(xi > 0)) fail(ErrorCode::InvalidParameter, "xi must be positive");

    FiringAssumptionReport report;
    report.xi = xi;

    constexpr int samples = 100001;
    const double lo = model.h() - 5.0;
    const double hi = model.h() + 5.0;
    const double step = (hi - lo) / (samples - 1);
    report.bounded = true;
    report.monotone = true;
    report.support = true;
    double prev = model.eval(lo);
    for (int i = 0; i < samples; ++i) {
        const double t = lo + i * step;
        const double f = model.eval(t);
        report.bounded = report.bounded && f >= 0.0 && f <= 1.0;
        report.monotone = report.monotone && f >= prev;
        if (t < model.h()) report.support = report.support && f == 0.0;
        prev = f;
    }

    double beta = model.beta();
    for (int i = 0; i < 3; ++i, beta *= 2.0) {
        report.betas.push_back(beta);
        report.decay_constants.push_back(decay_constant(model.with_beta(beta), xi));
    }
    const auto& c = report.decay_constants;
    report.decay_decreasing = c[1] < c[0] && c[2] < c[1];
    return report;
}

}  // namespace bumpforge
