#pragma once

#include <array>
#include <cmath>

#include "afs/dual.hpp"
#include "afs/errors.hpp"

// Articulated frame steering kinematics with a first-order actuator lag,
// combined into one control-affine system in the 6-state
// z = [x_f, y_f, theta_f, beta, v_f, u_betadot].

namespace afs {

struct VehicleState {
    double x_f = 0.0;      // front-axle midpoint x [m]
    double y_f = 0.0;      // front-axle midpoint y [m]
    double theta_f = 0.0;  // front-unit heading, unwrapped [rad]
    double beta = 0.0;     // articulation angle [rad]
};

struct ActuatorState {
    double v_f = 0.0;        // front-unit speed [m/s]
    double u_betadot = 0.0;  // articulation rate [rad/s]
};

struct AugmentedState {
    VehicleState vehicle;
    ActuatorState actuator;

    std::array<double, 6> flatten() const {
        return {vehicle.x_f,  vehicle.y_f,    vehicle.theta_f,
                vehicle.beta, actuator.v_f,   actuator.u_betadot};
    }
    static AugmentedState from_array(const std::array<double, 6>& z) {
        return {{z[0], z[1], z[2], z[3]}, {z[4], z[5]}};
    }
};

// Commanded input pair (what the safety filter outputs).
struct Command {
    double v_cmd = 0.0;        // [m/s]
    double betadot_cmd = 0.0;  // [rad/s]
};

struct VehicleGeometry {
    double l_f = 1.0;   // hitch to front axle [m]
    double l_r = 1.0;   // hitch to rear axle [m]
    double w_f = 1.0;   // front unit width [m]
    double w_r = 1.0;   // rear unit width [m]
    double beta_max = 0.5759586531581288;  // articulation limit [rad] (33 deg)
};

struct ActuatorParams {
    double k1 = 4.0;  // speed lag gain [1/s]
    double k2 = 4.0;  // articulation-rate lag gain [1/s]
};

inline void validate(const VehicleGeometry& g) {
    if (!(g.l_f > 0.0 && g.l_r > 0.0 && g.w_f > 0.0 && g.w_r > 0.0))
        throw ConfigError("vehicle geometry lengths must be positive");
    if (!(g.beta_max > 0.0 && g.beta_max < 1.5707963267948966))
        throw ConfigError("beta_max must lie in (0, pi/2)");
    // no kinematic singularity inside |beta| <= beta_max
    if (!(g.l_f * std::cos(g.beta_max) + g.l_r > 0.0))
        throw ConfigError("l_f*cos(beta_max) + l_r must stay positive");
}

inline void validate(const ActuatorParams& p) {
    if (!(p.k1 > 0.0 && p.k2 > 0.0)) throw ConfigError("actuator gains must be positive");
}

constexpr double kSingularDenominator = 1e-9;

// First-order lag: udot = f_u(u) + g_u * u_cmd with f_u = (-k1 v, -k2 w)
// and g_u = diag(k1, k2). Other affine actuator models can be swapped in by
// providing the same drift()/gain_diag() surface.
struct FirstOrderLag {
    double k1 = 4.0;
    double k2 = 4.0;

    template <class T>
    void drift(const T& v_f, const T& u_betadot, T& dv, T& dw) const {
        dv = (-k1) * v_f;
        dw = (-k2) * u_betadot;
    }
    // g_u is diagonal and state-independent for this model.
    std::array<double, 2> gain_diag() const { return {k1, k2}; }
};

inline FirstOrderLag lag_model(const ActuatorParams& p) { return {p.k1, p.k2}; }

namespace model {

// Kinematic part of the drift, z = [x_f, y_f, theta_f, beta, v_f, u_betadot].
// Writes the first four components of out.
template <class T>
void kinematic_rows(const std::array<T, 6>& z, const VehicleGeometry& g,
                    std::array<T, 6>& out) {
    using std::cos;
    using std::sin;
    const T& theta = z[2];
    const T& beta = z[3];
    const T& v = z[4];
    const T& w = z[5];
    T den = g.l_f * cos(beta) + g.l_r;
    if (real(den) <= kSingularDenominator)
        throw SingularGeometryError("l_f*cos(beta) + l_r <= 1e-9: outside model validity");
    out[0] = v * cos(theta);
    out[1] = v * sin(theta);
    out[2] = (v * sin(beta) + g.l_r * w) / den;
    out[3] = w;
}

// f_z(z): full drift of the augmented system (no commanded input).
template <class T, class ActModel = FirstOrderLag>
std::array<T, 6> drift(const std::array<T, 6>& z, const VehicleGeometry& g,
                       const ActModel& act) {
    std::array<T, 6> out{};
    kinematic_rows(z, g, out);
    act.drift(z[4], z[5], out[4], out[5]);
    return out;
}

}  // namespace model

// Time derivative of the kinematic states for a given actuator output.
inline VehicleState kinematics_rhs(const VehicleState& s, const ActuatorState& a,
                                   const VehicleGeometry& g) {
    std::array<double, 6> z = {s.x_f, s.y_f, s.theta_f, s.beta, a.v_f, a.u_betadot};
    std::array<double, 6> out{};
    model::kinematic_rows(z, g, out);
    return {out[0], out[1], out[2], out[3]};
}

inline ActuatorState actuator_rhs(const ActuatorState& a, const Command& cmd,
                                  const ActuatorParams& p) {
    return {p.k1 * (cmd.v_cmd - a.v_f), p.k2 * (cmd.betadot_cmd - a.u_betadot)};
}

// zdot = [f_AFS(x) + g_AFS(x) u ; f_u(u)] + [0 ; g_u(u)] u_cmd.
// The command enters only the actuator rows (relative-degree-2 structure).
inline AugmentedState augmented_rhs(const AugmentedState& z, const Command& cmd,
                                    const VehicleGeometry& g, const ActuatorParams& p) {
    VehicleState xdot = kinematics_rhs(z.vehicle, z.actuator, g);
    ActuatorState udot = actuator_rhs(z.actuator, cmd, p);
    return {xdot, udot};
}

}  // namespace afs
