#include "crosslab/propagator.hpp"
#include "crosslab/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace crosslab {

namespace odeint = boost::numeric::odeint;

namespace {

// Two columns of a 2x2 complex matrix as 8 reals: (re, im) of a, c, b, d.
using State = std::array<double, 8>;

State to_state(const Mat2& m) {
    return {m.a.real(), m.a.imag(), m.c.real(), m.c.imag(),
            m.b.real(), m.b.imag(), m.d.real(), m.d.imag()};
}

Mat2 from_state(const State& s) {
    return {cplx(s[0], s[1]), cplx(s[4], s[5]), cplx(s[2], s[3]), cplx(s[6], s[7])};
}

// Initial step: a tenth of the local period h / ||H||.
double initial_step(double v, double eps, double h, double span) {
    const double w = std::hypot(v, eps);
    const double dt = w > 0.0 ? 0.1 * h / w : span;
    return std::min(dt, span);
}

void check_underflow(double dt, double t, double h) {
    if (std::abs(dt) < 1e-13 * std::max(1.0, std::abs(t))) {
        throw Error(ErrorCode::StepUnderflow,
                    "step " + std::to_string(dt) + " at t=" + std::to_string(t) +
                        " with h=" + std::to_string(h));
    }
}

// Matrix flow by embedded Runge-Kutta-Fehlberg 7(8).
Mat2 flow_rkf78(const CouplingFn& v, double eps, double h, double t0, double t1,
                const PropagatorOptions& opt, PropagationStats& st) {
    auto rhs = [&](const State& x, State& dx, double t) {
        // psi' = -(i/h) H psi, column by column.
        const double vt = v(t) / h;
        const double e = eps / h;
        for (int col = 0; col < 2; ++col) {
            const double* p = x.data() + 4 * col;
            double* q = dx.data() + 4 * col;
            // (H psi)_1 = V p1 + eps p2, (H psi)_2 = eps p1 - V p2; -i (x + iy) = y - ix.
            const double r1 = vt * p[0] + e * p[2];
            const double i1 = vt * p[1] + e * p[3];
            const double r2 = e * p[0] - vt * p[2];
            const double i2 = e * p[1] - vt * p[3];
            q[0] = i1;
            q[1] = -r1;
            q[2] = i2;
            q[3] = -r2;
        }
    };
    // Local error target is tighter than tol: RK errors add up over ~1e4-1e5 steps
    // while the Magnus flow stays unitary by construction.
    auto stepper =
        odeint::make_controlled(0.01 * opt.tol, 0.0, odeint::runge_kutta_fehlberg78<State>());
    State x = to_state(Mat2::identity());
    const double span = std::abs(t1 - t0);
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double dt = dir * initial_step(v(t0), eps, h, span);
    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + dt - t1) > 0.0) dt = t1 - t;
        check_underflow(dt, t, h);
        if (stepper.try_step(rhs, x, t, dt) == odeint::success) {
            if (++st.steps > opt.max_steps) {
                throw Error(ErrorCode::StepUnderflow, "step budget exhausted at t=" + std::to_string(t));
            }
        } else {
            ++st.rejected;
        }
    }
    return from_state(x);
}

// -(i/h) H(t) as a traceless matrix.
Mat2 generator(double v, double eps, double h) {
    const cplx s = -kI / h;
    return {s * v, s * eps, s * eps, -s * v};
}

// Fourth-order Magnus step from t to t + dt with two Gauss points.
Mat2 magnus_step(const CouplingFn& v, double eps, double h, double t, double dt) {
    constexpr double kOff = 0.28867513459481288225;  // sqrt(3)/6
    const Mat2 a1 = generator(v(t + (0.5 - kOff) * dt), eps, h);
    const Mat2 a2 = generator(v(t + (0.5 + kOff) * dt), eps, h);
    const Mat2 comm = a2 * a1 - a1 * a2;
    const Mat2 omega = cplx(0.5 * dt) * (a1 + a2) + cplx(2.0 * kOff / 4.0 * dt * dt) * comm;
    return expm_traceless(omega);
}

// Step-doubling error control on the Magnus-4 scheme.
Mat2 flow_magnus4(const CouplingFn& v, double eps, double h, double t0, double t1,
                  const PropagatorOptions& opt, PropagationStats& st) {
    Mat2 m = Mat2::identity();
    const double span = std::abs(t1 - t0);
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double dt = dir * initial_step(v(t0), eps, h, span);
    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + dt - t1) > 0.0) dt = t1 - t;
        check_underflow(dt, t, h);
        const Mat2 full = magnus_step(v, eps, h, t, dt);
        const Mat2 half = magnus_step(v, eps, h, t + 0.5 * dt, 0.5 * dt) * magnus_step(v, eps, h, t, 0.5 * dt);
        const double err = max_abs(full - half) / 15.0;
        if (err <= opt.tol) {
            // Keep the two half steps; extrapolation would break unitarity.
            m = half * m;
            t += dt;
            if (++st.steps > opt.max_steps) {
                throw Error(ErrorCode::StepUnderflow, "step budget exhausted at t=" + std::to_string(t));
            }
        } else {
            ++st.rejected;
        }
        const double fac = err > 0.0 ? 0.9 * std::pow(opt.tol / err, 0.2) : 2.0;
        dt *= std::clamp(fac, 0.2, 2.0);
    }
    return m;
}

Mat2 flow(const CouplingFn& v, double eps, double h, double t0, double t1, const PropagatorOptions& opt,
          PropagationStats& st) {
    if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "h must be positive");
    if (eps < 0.0) throw Error(ErrorCode::ConfigError, "eps must be non-negative");
    if (!(opt.tol > 0.0)) throw Error(ErrorCode::ConfigError, "tol must be positive");
    if (t0 == t1) return Mat2::identity();
    Mat2 m = opt.stepper == Stepper::RKF78 ? flow_rkf78(v, eps, h, t0, t1, opt, st)
                                           : flow_magnus4(v, eps, h, t0, t1, opt, st);
    st.norm_drift = std::max(st.norm_drift, unitarity_defect(m));
    return m;
}

}  // namespace

std::string to_string(Stepper s) { return s == Stepper::RKF78 ? "rkf78" : "magnus4"; }

Stepper stepper_from_string(const std::string& s) {
    if (s == "rkf78") return Stepper::RKF78;
    if (s == "magnus4") return Stepper::Magnus4;
    throw Error(ErrorCode::ConfigError, "unknown stepper '" + s + "'");
}

Mat2 fundamental_matrix(const CouplingFn& v, double eps, double h, double t0, double t1,
                        const PropagatorOptions& opt, PropagationStats* stats) {
    PropagationStats local;
    PropagationStats& st = stats ? *stats : local;
    return flow(v, eps, h, t0, t1, opt, st);
}

Mat2 fundamental_matrix(const PotentialModel& model, double eps, double h, double t0, double t1,
                        const PropagatorOptions& opt, PropagationStats* stats) {
    return fundamental_matrix([&model](double t) { return model.eval(t); }, eps, h, t0, t1, opt, stats);
}

Vec2 propagate(const PotentialModel& model, double eps, double h, double t0, double t1, const Vec2& psi0,
               const PropagatorOptions& opt, PropagationStats* stats) {
    PropagationStats local;
    PropagationStats& st = stats ? *stats : local;
    const Mat2 m = fundamental_matrix(model, eps, h, t0, t1, opt, &st);
    const Vec2 out = m * psi0;
    st.norm_drift = std::abs(norm(out) - norm(psi0));
    return out;
}

}  // namespace crosslab
