#include "crosslab/scattering.hpp"
#include "crosslab/error.hpp"
#include "crosslab/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace crosslab {

namespace {

constexpr double kDropE = 1e-12;

// Far end beyond which the tail of |V - V_tail| integrates below `small`.
double tail_far_end(const PotentialModel& model, Side side, double t, double small) {
    if (model.family() == Family::PolynomialWindowed) {
        return side == Side::Right ? std::max(t, model.window()) : std::min(t, -model.window());
    }
    const double dir = side == Side::Right ? 1.0 : -1.0;
    const double step = 1.0 / model.tail_decay_rate();
    double far = t;
    for (int i = 0; i < 200; ++i) {
        if (std::abs(model.tail_integral(side, far)) < small) return far;
        far += dir * step;
    }
    throw Error(ErrorCode::TailNotConverged, "oscillatory tail does not decay");
}

JostTail tail_terms(const PotentialModel& model, double eps, double h, Side side, double t) {
    JostTail r;
    const double vt = side == Side::Right ? model.v_right() : model.v_left();
    r.d = model.tail_integral(side, t);
    const double lambda = std::hypot(vt, eps);
    const double s2 = lambda > 0.0 ? eps / lambda : 0.0;
    // Builtin tails are monotone past the anchors, so one integration by parts gives
    // |E| <= h |V(T) - V_tail| / lambda.
    r.e_bound = std::abs(r.d);
    if (lambda > 0.0) r.e_bound = std::min(r.e_bound, h * std::abs(model.eval(t) - vt) / lambda);
    if (s2 * r.e_bound / h < kDropE) return r;
    const double far = tail_far_end(model, side, t, 1e-3 * kDropE * h / std::max(s2, 1e-300));
    OscProblem p;
    p.lo = std::min(t, far);
    p.hi = std::max(t, far);
    p.origin = t;
    p.h = h;
    p.sign = 1;
    p.rate = [lambda](double) { return 2.0 * lambda; };
    p.amp = [&model, vt](double s) { return cplx(model.eval(s) - vt); };
    OscOptions o;
    o.max_panel = std::min(o.max_panel, model.resolution_scale());
    o.tol = 1e-14;
    const OscResult q = oscillatory_quadrature(p, o);
    r.e = std::polar(1.0, 2.0 * lambda * t / h) * q.value;
    return r;
}

}  // namespace

double jost_angle(double v, double eps) {
    if (eps == 0.0) return v > 0.0 ? 0.0 : std::numbers::pi / 2.0;
    const double lambda = std::hypot(v, eps);
    if (v > 0.0) return std::atan(eps / (lambda + v));
    return std::atan2(lambda - v, eps);
}

JostAngles jost_angles(const PotentialModel& model, double eps) {
    JostAngles a;
    a.theta_r = jost_angle(model.v_right(), eps);
    a.theta_l = jost_angle(model.v_left(), eps);
    a.eta_l = std::numbers::pi / 2.0 - a.theta_l;
    return a;
}

Mat2 free_basis(double v, double eps, double h, double t) {
    const double th = jost_angle(v, eps);
    const double lambda = std::hypot(v, eps);
    const cplx ep = std::polar(1.0, -lambda * t / h);
    const cplx em = std::conj(ep);
    const double c = std::cos(th);
    const double s = std::sin(th);
    return {ep * c, -em * s, ep * s, em * c};
}

Mat2 jost_basis(const PotentialModel& model, double eps, double h, Side side, double t, JostTail* tail) {
    if (!model.has_finite_tails()) {
        throw Error(ErrorCode::ConfigError, "Jost solutions need integrable tails");
    }
    const double vt = side == Side::Right ? model.v_right() : model.v_left();
    const JostTail tt = tail_terms(model, eps, h, side, t);
    if (tail) *tail = tt;
    const double th = jost_angle(vt, eps);
    const double c2 = std::cos(2.0 * th);
    const double s2 = std::sin(2.0 * th);
    // Coefficients c(t) in the free basis solve c' = -(i/h) A c with
    // A = (V - V_tail) [[c2, -s2 e^{2i lambda t/h}], [-s2 e^{-2i lambda t/h}, -c2]].
    // Both tail integrals are below 1e-13 past the anchors, so one Magnus term suffices.
    Mat2 u;
    if (side == Side::Right) {
        // c(t) = exp(+(i/h) int_t^inf A).
        u = expm_hermitian_phase(-c2 * tt.d, s2 * tt.e, h);
    } else {
        // c(t) = exp(-(i/h) int_{-inf}^t A).
        u = expm_hermitian_phase(c2 * tt.d, -s2 * tt.e, h);
    }
    return free_basis(vt, eps, h, t) * u;
}

namespace {

// Instantaneous eigenbasis at t; used for unbounded tails where free solutions do not exist.
Mat2 adiabatic_basis(const PotentialModel& model, double eps, double t) {
    const double th = jost_angle(model.eval(t), eps);
    const double c = std::cos(th);
    const double s = std::sin(th);
    return {c, -s, s, c};
}

// Truncation for LinearLZ: the first-order adiabatic remainder h eps |v| / (4 lambda^3)
// drops below 1e-9.
double lz_truncation(double v, double eps, double h) {
    const double av = std::abs(v);
    const double t = std::cbrt(h * std::max(eps, 1e-12) / (4.0 * av * av * 1e-9));
    return std::max(t, 20.0 / std::sqrt(av));
}

}  // namespace

ScatteringReport scattering_matrix(const PotentialModel& model, double eps, double h,
                                   const ScatteringOptions& opt) {
    if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "h must be positive");
    ScatteringReport r;
    Mat2 jr;
    Mat2 jl;
    if (model.has_finite_tails()) {
        r.t_right = std::isnan(opt.t_right) ? model.tail_anchor(Side::Right) : opt.t_right;
        r.t_left = std::isnan(opt.t_left) ? model.tail_anchor(Side::Left) : opt.t_left;
        jr = jost_basis(model, eps, h, Side::Right, r.t_right, &r.tail_right);
        jl = jost_basis(model, eps, h, Side::Left, r.t_left, &r.tail_left);
    } else {
        const double t = lz_truncation(model.c(), eps, h);
        r.t_right = std::isnan(opt.t_right) ? t : opt.t_right;
        r.t_left = std::isnan(opt.t_left) ? -t : opt.t_left;
        jr = adiabatic_basis(model, eps, r.t_right);
        jl = adiabatic_basis(model, eps, r.t_left);
        r.adiabatic_ends = true;
    }
    if (!(r.t_right > r.t_left)) throw Error(ErrorCode::ConfigError, "truncation points out of order");
    const Mat2 m = fundamental_matrix(model, eps, h, r.t_left, r.t_right, opt.prop, &r.stats);
    r.s = jr.adjoint() * m * jl;
    r.p = std::norm(r.s.c);
    r.unitarity_defect = unitarity_defect(r.s);
    return r;
}

double default_anchor(const PotentialModel& model, const CrossingCatalog& cat, Side side, double floor) {
    const double dir = side == Side::Right ? 1.0 : -1.0;
    const double step = std::isfinite(model.resolution_scale()) ? model.resolution_scale() : 1.0;
    double t = cat.crossings.empty() ? 0.0
                                     : (side == Side::Right ? cat.crossings.front().t : cat.crossings.back().t);
    for (int i = 0; i < 4096; ++i) {
        t += dir * step;
        if (std::abs(model.tail_integral(side, t)) > floor) return t;
    }
    throw Error(ErrorCode::TailIntegralVanishes, "no anchor with a non-vanishing tail integral");
}

Connector connector_T_r(const PotentialModel& model, const CrossingCatalog& cat, double h, double anchor) {
    const RegularizedAction ra = regularized_action(model, cat, Side::Right, anchor, true);
    Connector c;
    c.action = ra.value;
    const cplx e = std::polar(1.0, -ra.value / h);
    c.m = Mat2::diag(e, std::conj(e));
    c.error_diag = "eps^2/h";
    c.error_off = "eps^2";
    return c;
}

Connector connector_T_ell(const PotentialModel& model, const CrossingCatalog& cat, double h, double anchor) {
    const RegularizedAction ra = regularized_action(model, cat, Side::Left, anchor, true);
    Connector c;
    c.action = ra.value;
    const cplx e = std::polar(1.0, -ra.value / h);
    if (model.v_left() > 0.0) {
        c.m = Mat2::diag(e, std::conj(e));
        c.error_diag = "eps^2/h";
        c.error_off = "eps^2";
    } else {
        c.m = {0.0, -e, std::conj(e), 0.0};
        c.error_diag = "eps";
        c.error_off = "eps^2/h";
    }
    return c;
}

Mat2 jost_gauge_matrix(const PotentialModel& model, const CrossingCatalog& cat, double eps, double h,
                       double t, double anchor, const PropagatorOptions& prop) {
    const double tr = model.tail_anchor(Side::Right);
    const Mat2 j_far = jost_basis(model, eps, h, Side::Right, tr);
    const Mat2 j_t = fundamental_matrix(model, eps, h, tr, t, prop) * j_far;
    const double rr = regularized_action(model, cat, Side::Right, anchor).value;
    const double phase = model.integral(anchor, t) / h;
    const cplx up = std::polar(1.0, -phase);  // u_r^+(t)
    const Mat2 gauge = Mat2::diag(std::conj(up), up);
    const cplx er = std::polar(1.0, rr / h);
    return gauge * j_t * Mat2::diag(er, std::conj(er));
}

}  // namespace crosslab
