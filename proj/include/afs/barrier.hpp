#pragma once

#include <array>

#include "afs/vehicle_model.hpp"

// HOCBF candidates for circular obstacles and the penalty-adaptive psi-chain
// for the relative-degree-2 augmented system:
//   h0 = d^2 - Ro^2
//   h1 = d^2 - (Ro + r_s cos(eta))^2,   eta = clamp(theta_o - theta_f, +-pi/2)
//   h2 = ln(h1 / d_min^2)
//   psi1 = h2dot + p1 h2^2
//   psi2 = psi1dot + p2 psi1
// Derivatives are exact forward-mode duals (second order via nesting), taken
// on the branch of the eta-clamp active at the evaluated point.

namespace afs {

struct Obstacle {
    double x_o = 0.0;
    double y_o = 0.0;
    double radius = 1.0;
};

struct BarrierParams {
    double r_s = 1.4142135623730951;  // bearing-dependent expansion distance [m]
    double d_min = 0.5;               // minimum desired boundary distance [m]
};

inline void validate(const Obstacle& o) {
    if (!(o.radius > 0.0)) throw ConfigError("obstacle radius must be positive");
}
inline void validate(const BarrierParams& bp) {
    if (!(bp.r_s > 0.0 && bp.d_min > 0.0)) throw ConfigError("r_s and d_min must be positive");
}

// Adaptive penalty state, one per obstacle, integrated between QP solves.
struct PacbfState {
    double p1 = 0.5;
};

struct BarrierEvaluation {
    double h0 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double h2_dot = 0.0;                     // Lf h2 (no command influence)
    double lf2_h2 = 0.0;                     // Lf^2 h2
    std::array<double, 2> lglf_h2{};         // command coefficients in h2ddot
    double psi1 = 0.0;                       // h2_dot + p1 h2^2
    double eta = 0.0;                        // clamped relative bearing [rad]
    bool clamp_boundary = false;             // |theta_o - theta_f| within 1e-6 of pi/2
};

// One inequality row over the per-obstacle decision block
// (u_cmd1, u_cmd2, nu1, delta1, p2), encoded as a.x <= b.
struct ConstraintRow {
    std::array<double, 5> a{};
    double b = 0.0;
};

double eta(const VehicleState& s, const Obstacle& obs);

// (h0, h1, h2); throws BarrierDomainError when h1 <= 0.
std::array<double, 3> h_values(const VehicleState& s, const Obstacle& obs,
                               const BarrierParams& bp);

BarrierEvaluation barrier_chain(const AugmentedState& z, const PacbfState& ps,
                                const Obstacle& obs, const BarrierParams& bp,
                                const VehicleGeometry& geom, const ActuatorParams& ap);

// psi2 >= 0 as a row:  -[lglf, h2^2, 0, psi1] . x <= lf2_h2 + 2 p1 h2 h2_dot
ConstraintRow pacbf_constraint_row(const BarrierEvaluation& ev, const PacbfState& ps);

// p1 + nu1 >= 0  ->  -nu1 <= p1
ConstraintRow nu_positivity_row(const PacbfState& ps);

// 2(p1 - p1*) nu1 + eps (p1 - p1*)^2 <= delta1
ConstraintRow clf_row(const PacbfState& ps, double p1_star, double eps);

// psi2 evaluated directly at given decision variables (diagnostics and tests).
double psi2_value(const BarrierEvaluation& ev, const PacbfState& ps, const Command& cmd,
                  double nu1, double p2);

}  // namespace afs
