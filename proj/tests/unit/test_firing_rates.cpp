#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bumpforge/errors.hpp"
#include "bumpforge/firing_rates.hpp"
#include "fixtures.hpp"

using namespace bumpforge;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const BumpError& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected BumpError";
    return ErrorCode::DataError;
}

}  // namespace

TEST(FiringRates, HillValuesAtAndAboveThreshold) {
    const FiringRateModel f = fixtures::hill(100, 0.2);
    EXPECT_EQ(f(0.2), 0.0);
    EXPECT_NEAR(f(0.2 + 1.0 / 100), 0.5, 1e-12);
    EXPECT_EQ(f(0.1), 0.0);
    // z = 3: 9/10
    EXPECT_NEAR(f(0.23), 0.9, 1e-12);
}

TEST(FiringRates, StepIsClosedIndicator) {
    const FiringRateModel f = fixtures::step(0.3);
    EXPECT_TRUE(f.is_step());
    EXPECT_EQ(f(0.29), 0.0);
    EXPECT_EQ(f(0.31), 1.0);
    EXPECT_EQ(f(0.3), 1.0);
    EXPECT_EQ(code_of([&] { (void)f.deriv(0.5); }), ErrorCode::NotApplicable);
}

TEST(FiringRates, InfiniteBetaYieldsStep) {
    EXPECT_TRUE(make_firing_rate(FiringFamily::Hill, infinite_beta, 0.2).is_step());
    EXPECT_TRUE(make_firing_rate(FiringFamily::Logistic, infinite_beta, 0.2).is_step());
}

TEST(FiringRates, LogisticIsStandardSigmoid) {
    const FiringRateModel f = make_firing_rate(FiringFamily::Logistic, 10, 0.2);
    EXPECT_NEAR(f(0.2), 0.5, 1e-15);
    EXPECT_NEAR(f(0.3), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
    EXPECT_NEAR(f(0.1), 1.0 / (1.0 + std::exp(1.0)), 1e-15);
    EXPECT_GT(f(-1.0), 0.0);
    EXPECT_FALSE(f.has_threshold_support());
}

TEST(FiringRates, RejectsInvalidParameters) {
    EXPECT_EQ(code_of([] { make_firing_rate(FiringFamily::Hill, 100, 0.0); }), ErrorCode::InvalidParameter);
    EXPECT_EQ(code_of([] { make_firing_rate(FiringFamily::Hill, 100, -0.1); }), ErrorCode::InvalidParameter);
    EXPECT_EQ(code_of([] { make_firing_rate(FiringFamily::Hill, 0.0, 0.2); }), ErrorCode::InvalidParameter);
    EXPECT_EQ(code_of([] { make_firing_rate(FiringFamily::Logistic, -3, 0.2); }), ErrorCode::InvalidParameter);
    EXPECT_EQ(code_of([] { make_firing_rate(FiringFamily::Hill, 100, 0.2, 1.0); }), ErrorCode::InvalidParameter);
}

TEST(FiringRates, RangeAndMonotonicity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-2.0, 3.0);
    for (const auto& f : {fixtures::hill(100, 0.2), fixtures::hill(7, 0.3), fixtures::step(0.25),
                          make_firing_rate(FiringFamily::Hill, 40, 0.1, 3.5),
                          make_firing_rate(FiringFamily::Logistic, 20, 0.2)}) {
        for (int i = 0; i < 2000; ++i) {
            double t1 = dist(rng), t2 = dist(rng);
            if (t1 > t2) std::swap(t1, t2);
            EXPECT_GE(f(t1), 0.0);
            EXPECT_LE(f(t2), 1.0);
            EXPECT_LE(f(t1), f(t2));
        }
    }
}

TEST(FiringRates, DerivativeMatchesFiniteDifferences) {
    for (const auto& f : {fixtures::hill(100, 0.2), make_firing_rate(FiringFamily::Hill, 30, 0.3, 3.0),
                          make_firing_rate(FiringFamily::Logistic, 20, 0.2)}) {
        for (double t = 0.2 + 1e-3; t < 1.5; t += 0.0173) {
            const double eps = 1e-6 * std::max(1.0, std::abs(t));
            const double fd = (f(t + eps) - f(t - eps)) / (2 * eps);
            // Hill closed form: β p z^{p−1} / (z^p + 1)².
            EXPECT_NEAR(f.deriv(t), fd, 1e-6 * std::max(1.0, std::abs(fd))) << t;
        }
    }
    const FiringRateModel f = fixtures::hill(100, 0.2);
    const double z = 2.0;
    EXPECT_NEAR(f.deriv(0.2 + z / 100), 100 * 2 * z / ((z * z + 1) * (z * z + 1)), 1e-12);
}

TEST(FiringRates, AssumptionReportForHill) {
    const FiringAssumptionReport r = check_firing_assumptions(fixtures::hill(100, 0.2), 0.05);
    EXPECT_TRUE(r.bounded);
    EXPECT_TRUE(r.monotone);
    EXPECT_TRUE(r.support);
    ASSERT_EQ(r.decay_constants.size(), 3u);
    ASSERT_EQ(r.betas.size(), 3u);
    EXPECT_EQ(r.betas[1], 200.0);
    EXPECT_GT(r.decay_constants[0], r.decay_constants[1]);
    EXPECT_TRUE(r.decay_decreasing);
    EXPECT_TRUE(r.passed());
    // Oracle: f′ is decreasing on (h + ξ, ∞) once z > 1/√3, so C_β = f′(h + ξ).
    const FiringRateModel f = fixtures::hill(100, 0.2);
    EXPECT_NEAR(r.decay_constants[0], f.deriv(0.25), 1e-3 * f.deriv(0.25));
}

TEST(FiringRates, LogisticFailsSupportCheck) {
    const FiringAssumptionReport r = check_firing_assumptions(make_firing_rate(FiringFamily::Logistic, 100, 0.2), 0.05);
    EXPECT_FALSE(r.support);
    EXPECT_TRUE(r.monotone);
    EXPECT_FALSE(r.passed());
}

TEST(FiringRates, StepHasNoAssumptionReport) {
    EXPECT_EQ(code_of([] { check_firing_assumptions(fixtures::step(0.2), 0.05); }), ErrorCode::NotApplicable);
}

TEST(FiringRates, PointwiseConvergenceToStep) {
    const double h = 0.2, xi = 0.02;
    const FiringRateModel f2 = fixtures::hill(1e2, h), f3 = fixtures::hill(1e3, h), inf = fixtures::step(h);
    for (double t = -1.0; t < 2.0; t += 0.001) {
        if (std::abs(t - h) < xi) continue;
        EXPECT_LE(std::abs(f3(t) - inf(t)), std::abs(f2(t) - inf(t)) + 1e-15) << t;
    }
}

TEST(FiringRates, WithBetaKeepsFamilyAndThreshold) {
    const FiringRateModel f = make_firing_rate(FiringFamily::Hill, 100, 0.2, 3.0).with_beta(250);
    EXPECT_EQ(f.family(), FiringFamily::Hill);
    EXPECT_EQ(f.beta(), 250.0);
    EXPECT_EQ(f.h(), 0.2);
    EXPECT_EQ(f.p(), 3.0);
}
