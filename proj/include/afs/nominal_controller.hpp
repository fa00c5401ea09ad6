#pragma once

#include <cmath>

#include "afs/errors.hpp"
#include "afs/vehicle_model.hpp"

// Line-of-sight goal-reaching law. Produces the nominal input the safety
// filter minimally modifies; intentionally simple, no convergence claim.

namespace afs {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct NominalParams {
    double v_ref = 1.0;     // constant reference speed [m/s], nonzero
    double k_omega = 1.5;   // heading-error gain [1/s]
    Point goal{9.0, 9.0};
    bool use_measured_speed = false;  // evaluate the sin(beta) term with measured v_f
};

inline void validate(const NominalParams& p) {
    if (p.v_ref == 0.0) throw ConfigError("v_ref must be nonzero");
    if (!(p.k_omega > 0.0)) throw ConfigError("k_omega must be positive");
}

// Wrap an angle difference to (-pi, pi].
inline double wrap_pi(double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double k = std::ceil((a - 3.1415926535897932384626433832795) / two_pi);
    return a - two_pi * k;
}

// Four-quadrant bearing of the goal, unwrapped into (theta_f - pi, theta_f + pi].
inline double line_of_sight(const VehicleState& s, const Point& goal) {
    double dx = goal.x - s.x_f;
    double dy = goal.y - s.y_f;
    if (std::hypot(dx, dy) <= 1e-9)
        throw DegenerateGoalError("vehicle coincides with goal point");
    double raw = std::atan2(dy, dx);
    return s.theta_f + wrap_pi(raw - s.theta_f);
}

// u_betadot_ref = -(v/l_r) sin(beta) + (l_f/l_r cos(beta) + 1) k_omega (theta_d - theta_f).
// Evaluated with v = v_ref unless a measured speed is supplied. Not clipped to
// actuator bounds; the QP owns the bounds.
inline Command nominal_input(const VehicleState& s, const NominalParams& p,
                             const VehicleGeometry& g, double v_measured) {
    double theta_d = line_of_sight(s, p.goal);
    double omega_ref = p.k_omega * (theta_d - s.theta_f);
    double v = p.use_measured_speed ? v_measured : p.v_ref;
    double betadot_ref =
        -(v / g.l_r) * std::sin(s.beta) + (g.l_f / g.l_r * std::cos(s.beta) + 1.0) * omega_ref;
    return {p.v_ref, betadot_ref};
}

inline Command nominal_input(const VehicleState& s, const NominalParams& p,
                             const VehicleGeometry& g) {
    return nominal_input(s, p, g, p.v_ref);
}

}  // namespace afs
