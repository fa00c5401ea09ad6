#include "afs/barrier.hpp"

#include <cmath>

#include "afs/dual.hpp"

namespace afs {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kHalfPi = 1.5707963267948966192313216916398;
constexpr double kClampDiagnosticMargin = 1e-6;

// Wrap to (-pi, pi]; the shift is constant so derivatives pass through.
template <class T>
T wrap_pi_t(const T& a) {
    double k = std::ceil((real(a) - kPi) / (2.0 * kPi));
    return a - 2.0 * kPi * k;
}

// Symmetric clamp at +-pi/2, branch chosen on the real part. Exact boundary
// ties resolve to the clamped (constant) branch.
template <class T>
T clamp_eta(const T& diff) {
    double d = real(diff);
    if (d >= kHalfPi) return T(kHalfPi);
    if (d <= -kHalfPi) return T(-kHalfPi);
    return diff;
}

template <class T>
T sq(const T& x) {
    return x * x;
}

template <class T>
T h1_value(const T& x_f, const T& y_f, const T& theta_f, const Obstacle& obs,
           const BarrierParams& bp) {
    using std::atan2;
    using std::cos;
    T d2 = sq(x_f - obs.x_o) + sq(y_f - obs.y_o);
    T theta_o = atan2(obs.y_o - y_f, obs.x_o - x_f);
    T e = clamp_eta(wrap_pi_t(theta_o - theta_f));
    return d2 - sq(obs.radius + bp.r_s * cos(e));
}

template <class T>
T h2_value(const T& x_f, const T& y_f, const T& theta_f, const Obstacle& obs,
           const BarrierParams& bp) {
    using std::log;
    T h1 = h1_value(x_f, y_f, theta_f, obs, bp);
    if (!(real(h1) > 0.0))
        throw BarrierDomainError("h1 <= 0: vehicle inside expanded unsafe region", -1);
    return log(h1 / (bp.d_min * bp.d_min));
}

// Lf h2 = grad(h2) . f_z; h2 depends only on (x_f, y_f, theta_f), so only the
// kinematic drift rows contribute.
template <class T>
T h2dot_value(const std::array<T, 6>& z, const Obstacle& obs, const BarrierParams& bp,
              const VehicleGeometry& geom, const FirstOrderLag& act) {
    std::array<T, 6> fz = model::drift(z, geom, act);
    T acc(0.0);
    for (size_t i = 0; i < 3; ++i) {
        std::array<Dual<T>, 3> args = {Dual<T>(z[0], T(0.0)), Dual<T>(z[1], T(0.0)),
                                       Dual<T>(z[2], T(0.0))};
        args[i].der = T(1.0);
        Dual<T> h2 = h2_value(args[0], args[1], args[2], obs, bp);
        acc = acc + h2.der * fz[i];
    }
    return acc;
}

double require_positive_distance(const VehicleState& s, const Obstacle& obs) {
    double d = std::hypot(obs.x_o - s.x_f, obs.y_o - s.y_f);
    if (d <= 1e-9)
        throw BarrierDomainError("vehicle front point coincides with obstacle center", -1);
    return d;
}

}  // namespace

double eta(const VehicleState& s, const Obstacle& obs) {
    require_positive_distance(s, obs);
    double theta_o = std::atan2(obs.y_o - s.y_f, obs.x_o - s.x_f);
    double diff = wrap_pi_t(theta_o - s.theta_f);
    if (diff >= kHalfPi) return kHalfPi;
    if (diff <= -kHalfPi) return -kHalfPi;
    return diff;
}

std::array<double, 3> h_values(const VehicleState& s, const Obstacle& obs,
                               const BarrierParams& bp) {
    require_positive_distance(s, obs);
    double d2 = sq(s.x_f - obs.x_o) + sq(s.y_f - obs.y_o);
    double h0 = d2 - obs.radius * obs.radius;
    double h1 = h1_value(s.x_f, s.y_f, s.theta_f, obs, bp);
    if (!(h1 > 0.0))
        throw BarrierDomainError("h1 <= 0: vehicle inside expanded unsafe region", -1);
    double h2 = std::log(h1 / (bp.d_min * bp.d_min));
    return {h0, h1, h2};
}

BarrierEvaluation barrier_chain(const AugmentedState& z, const PacbfState& ps,
                                const Obstacle& obs, const BarrierParams& bp,
                                const VehicleGeometry& geom, const ActuatorParams& ap) {
    BarrierEvaluation ev;
    auto h = h_values(z.vehicle, obs, bp);
    ev.h0 = h[0];
    ev.h1 = h[1];
    ev.h2 = h[2];
    ev.eta = eta(z.vehicle, obs);

    double theta_o = std::atan2(obs.y_o - z.vehicle.y_f, obs.x_o - z.vehicle.x_f);
    double diff = wrap_pi_t(theta_o - z.vehicle.theta_f);
    ev.clamp_boundary = std::abs(std::abs(diff) - kHalfPi) < kClampDiagnosticMargin;

    const FirstOrderLag act = lag_model(ap);
    const std::array<double, 6> zf = z.flatten();

    ev.h2_dot = h2dot_value(zf, obs, bp, geom, act);

    // grad of Lf h2 over all six states, by nested duals.
    std::array<double, 6> grad_hdot{};
    for (size_t i = 0; i < 6; ++i) {
        std::array<Dual1, 6> zd;
        for (size_t j = 0; j < 6; ++j) zd[j] = Dual1(zf[j]);
        zd[i].der = 1.0;
        grad_hdot[i] = h2dot_value(zd, obs, bp, geom, act).der;
    }

    std::array<double, 6> fz = model::drift(zf, geom, act);
    double lf2 = 0.0;
    for (size_t i = 0; i < 6; ++i) lf2 += grad_hdot[i] * fz[i];
    ev.lf2_h2 = lf2;

    const auto gains = act.gain_diag();
    ev.lglf_h2 = {grad_hdot[4] * gains[0], grad_hdot[5] * gains[1]};

    ev.psi1 = ev.h2_dot + ps.p1 * ev.h2 * ev.h2;
    return ev;
}

ConstraintRow pacbf_constraint_row(const BarrierEvaluation& ev, const PacbfState& ps) {
    ConstraintRow row;
    row.a = {-ev.lglf_h2[0], -ev.lglf_h2[1], -(ev.h2 * ev.h2), 0.0, -ev.psi1};
    row.b = ev.lf2_h2 + 2.0 * ps.p1 * ev.h2 * ev.h2_dot;
    return row;
}

ConstraintRow nu_positivity_row(const PacbfState& ps) {
    ConstraintRow row;
    row.a = {0.0, 0.0, -1.0, 0.0, 0.0};
    row.b = ps.p1;
    return row;
}

ConstraintRow clf_row(const PacbfState& ps, double p1_star, double eps) {
    double err = ps.p1 - p1_star;
    ConstraintRow row;
    row.a = {0.0, 0.0, 2.0 * err, -1.0, 0.0};
    row.b = -eps * err * err;
    return row;
}

double psi2_value(const BarrierEvaluation& ev, const PacbfState& ps, const Command& cmd,
                  double nu1, double p2) {
    double psi1dot = ev.lf2_h2 + ev.lglf_h2[0] * cmd.v_cmd + ev.lglf_h2[1] * cmd.betadot_cmd +
                     nu1 * ev.h2 * ev.h2 + 2.0 * ps.p1 * ev.h2 * ev.h2_dot;
    return psi1dot + p2 * ev.psi1;
}

}  // namespace afs
