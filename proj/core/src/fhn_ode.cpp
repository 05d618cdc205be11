#include "bumpforge/fhn_ode.hpp"

#include <cmath>

#include "bumpforge/errors.hpp"
#include "bumpforge/numerics.hpp"

namespace bumpforge {

PhasePoint fhn_field(double k, const FiringRateModel& firing, PhasePoint p) noexcept {
    return {p.v, k * k * p.u - firing(p.u)};
}

double fhn_energy(double k, const FiringRateModel& firing, PhasePoint p) {
    double F = 0.0;
    const double h = firing.h();
    if (firing.is_step()) {
        F = p.u > h ? p.u - h : 0.0;
    } else if (p.u > h || !firing.has_threshold_support()) {
        const double lo = firing.has_threshold_support() ? h : std::min(p.u, h) - 40.0 / firing.beta();
        F = numerics::adaptive_simpson([&](double t) { return firing(t); }, lo, p.u, 1e-13);
    }
    return 0.5 * p.v * p.v - 0.5 * k * k * p.u * p.u + F;
}

Trajectory shoot_homoclinic(double k, const FiringRateModel& firing, double x_end, double step) {
    const double h = firing.h();
    if (!(k > 0) || !std::isfinite(k)) fail(ErrorCode::InvalidParameter, "shoot: k must be positive");
    if (!(k < 1.0 / std::sqrt(2.0 * h))) {
        fail(ErrorCode::NotApplicable, "shoot: no homoclinic orbit through the threshold unless k < 1/sqrt(2h)");
    }
    if (!std::isfinite(x_end) || x_end == 0.0) fail(ErrorCode::InvalidParameter, "shoot: x_end must be finite and nonzero");
    if (!(std::abs(step) > 0) || !std::isfinite(step)) fail(ErrorCode::InvalidParameter, "shoot: step must be nonzero");

    const long n = std::lround(std::ceil(std::abs(x_end) / std::abs(step) - 1e-9));
    const double dx = x_end / static_cast<double>(n);

    Trajectory t;
    t.x.reserve(static_cast<std::size_t>(n) + 1);
    t.points.reserve(static_cast<std::size_t>(n) + 1);
    PhasePoint p{h, k * h};
    t.x.push_back(0.0);
    t.points.push_back(p);

    auto axpy = [](PhasePoint a, double s, PhasePoint b) { return PhasePoint{a.u + s * b.u, a.v + s * b.v}; };
    for (long i = 1; i <= n; ++i) {
        const PhasePoint k1 = fhn_field(k, firing, p);
        const PhasePoint k2 = fhn_field(k, firing, axpy(p, dx / 2, k1));
        const PhasePoint k3 = fhn_field(k, firing, axpy(p, dx / 2, k2));
        const PhasePoint k4 = fhn_field(k, firing, axpy(p, dx, k3));
        p.u += dx / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
        p.v += dx / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
        t.x.push_back(static_cast<double>(i) * dx);
        t.points.push_back(p);
        if (!std::isfinite(p.u) || std::abs(p.u) > 1e3) {
            t.blew_up = true;
            break;
        }
    }
    return t;
}

}  // namespace bumpforge
