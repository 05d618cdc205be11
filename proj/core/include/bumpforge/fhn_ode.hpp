#pragma once

#include <vector>

#include "bumpforge/firing_rates.hpp"

namespace bumpforge {

/// For the exponential kernel ω(x) = e^{−k|x|}/2 a stationary bump solves
/// u″ = k²u − f(u). This is that planar system.
struct PhasePoint {
    double u = 0.0;
    double v = 0.0;
};

PhasePoint fhn_field(double k, const FiringRateModel& firing, PhasePoint p) noexcept;

/// E = v²/2 − k²u²/2 + F(u), F′ = f. Conserved along the flow. For the step
/// rate F(u) = (u − h)₊.
double fhn_energy(double k, const FiringRateModel& firing, PhasePoint p);

struct Trajectory {
    std::vector<double> x;
    std::vector<PhasePoint> points;
    /// |u| exceeded 1e3 before x_end; the trajectory stops there.
    bool blew_up = false;
};

/// Classical RK4 from (u, v)(0) = (h, k h) towards x_end with fixed step
/// (negative x_end integrates backwards; the step sign is taken from x_end).
/// Requires k < 1/√(2h). For the step rate this follows the homoclinic
/// orbit through the threshold, i.e. u_∞(x − a) with a the bump half-width.
Trajectory shoot_homoclinic(double k, const FiringRateModel& firing, double x_end, double step);

/// max |u(x) − reference(x)| over the trajectory nodes.
template <class F>
double sup_deviation(const Trajectory& t, F&& reference) {
    double m = 0.0;
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        const double d = t.points[i].u - reference(t.x[i]);
        m = d < 0 ? (m > -d ? m : -d) : (m > d ? m : d);
    }
    return m;
}

}  // namespace bumpforge
