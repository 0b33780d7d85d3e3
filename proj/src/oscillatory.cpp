#include "crosslab/oscillatory.hpp"
#include "crosslab/error.hpp"
#include "crosslab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace crosslab {

namespace {

constexpr int kHigh = 20;
constexpr int kLow = 12;

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

// Legendre values P_0..P_n at x.
void legendre(double x, int n, double* p) {
    p[0] = 1.0;
    if (n >= 1) p[1] = x;
    for (int k = 2; k <= n; ++k) p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
}

// Panel-local antiderivative of a function sampled at the high-order Gauss nodes.
class PanelPrimitive {
public:
    PanelPrimitive(const GaussRule& g, const double* samples) {
        std::array<double, kHigh + 1> p{};
        coef_.fill(0.0);
        for (int i = 0; i < kHigh; ++i) {
            legendre(g.x[i], kHigh - 1, p.data());
            for (int k = 0; k < kHigh; ++k) coef_[k] += g.w[i] * samples[i] * p[k];
        }
        for (int k = 0; k < kHigh; ++k) coef_[k] *= (2.0 * k + 1.0) / 2.0;
    }

    // int_{-1}^{x} of the interpolant.
    [[nodiscard]] double operator()(double x) const {
        std::array<double, kHigh + 2> p{};
        legendre(x, kHigh, p.data());
        double s = coef_[0] * (x + 1.0);
        for (int k = 1; k < kHigh; ++k) s += coef_[k] * (p[k + 1] - p[k - 1]) / (2.0 * k + 1.0);
        return s;
    }

private:
    std::array<double, kHigh> coef_{};
};

struct PanelOut {
    cplx value;
    double err = 0.0;
    double phase_end = 0.0;  // int_lo^hi rate
};

PanelOut panel(const OscProblem& p, double lo, double hi, double phase_lo) {
    const GaussRule& gh = gauss_legendre(kHigh);
    const GaussRule& gl = gauss_legendre(kLow);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    std::array<double, kHigh> rates{};
    for (int i = 0; i < kHigh; ++i) rates[i] = p.rate(mid + half * gh.x[i]);
    const PanelPrimitive prim(gh, rates.data());
    const double scale = p.sign / p.h;
    auto term = [&](double x) {
        const double ph = phase_lo + half * prim(x);
        return p.amp(mid + half * x) * std::polar(1.0, scale * ph);
    };
    cplx hi_sum = 0.0;
    for (int i = 0; i < kHigh; ++i) hi_sum += gh.w[i] * term(gh.x[i]);
    cplx lo_sum = 0.0;
    for (int i = 0; i < kLow; ++i) lo_sum += gl.w[i] * term(gl.x[i]);
    return {half * hi_sum, half * std::abs(hi_sum - lo_sum), phase_lo + half * prim(1.0)};
}

// Integrates panel [lo, hi] with bisection on failure; returns value and accumulates phase.
cplx adaptive_panel(const OscProblem& p, const OscOptions& opt, double lo, double hi, double& phase,
                    double& err, std::size_t& count, int depth) {
    const PanelOut out = panel(p, lo, hi, phase);
    if (out.err <= opt.tol || depth >= opt.max_bisect) {
        if (out.err > opt.tol) {
            throw Error(ErrorCode::QuadratureTolExceeded,
                        "oscillatory panel error " + std::to_string(out.err) + " at t=" + std::to_string(lo));
        }
        phase = out.phase_end;
        err += out.err;
        ++count;
        return out.value;
    }
    const double mid = 0.5 * (lo + hi);
    const cplx a = adaptive_panel(p, opt, lo, mid, phase, err, count, depth + 1);
    const cplx b = adaptive_panel(p, opt, mid, hi, phase, err, count, depth + 1);
    return a + b;
}

// Marches from `start` toward `end` (either direction) with phase known at `start`.
cplx march(const OscProblem& p, const OscOptions& opt, double start, double end, double phase_start,
           double& err, std::size_t& count) {
    if (start == end) return 0.0;
    const double dir = end > start ? 1.0 : -1.0;
    cplx total = 0.0;
    double t = start;
    double phase = phase_start;
    while (dir * (end - t) > 0.0) {
        auto len_at = [&](double s) {
            const double r = std::abs(p.rate(s));
            double len = r > 0.0 ? opt.panel_fraction * p.h / r : opt.max_panel;
            if (std::abs(s - p.origin) <= p.floor_radius) len = std::max(len, p.floor);
            return std::min(len, opt.max_panel);
        };
        double len = len_at(t);
        len = std::min(len, len_at(t + dir * len));
        if (dir * (end - t) < 1.5 * len) len = dir * (end - t);
        const double next = t + dir * len;
        double ph = phase;
        if (dir > 0) {
            total += adaptive_panel(p, opt, t, next, ph, err, count, 0);
        } else {
            // Integrate [next, t] forward: phase at `next` is unknown, so shift afterwards.
            double ph_rel = 0.0;
            const cplx v = adaptive_panel(p, opt, next, t, ph_rel, err, count, 0);
            const double phase_next = phase - ph_rel;
            total += v * std::polar(1.0, p.sign / p.h * phase_next);
            ph = phase_next;
        }
        phase = ph;
        t = next;
    }
    return total;
}

}  // namespace

cplx omega_m(int m, double v) {
    if (m < 1 || v == 0.0) throw Error(ErrorCode::ConfigError, "omega_m needs m >= 1 and v != 0");
    const double mp1 = m + 1.0;
    const double mag = 2.0 * std::pow(factorial(m + 1) / (2.0 * std::abs(v)), 1.0 / mp1) *
                       std::tgamma((m + 2.0) / mp1);
    const double ang = std::numbers::pi / (2.0 * mp1);
    if (m % 2 == 0) return mag * std::cos(ang);
    return std::polar(mag, (v > 0 ? 1.0 : -1.0) * ang);
}

cplx stationary_phase_leading(cplx f_t0, int m, double v, double h) {
    return f_t0 * omega_m(m, v) * std::pow(h, 1.0 / (m + 1.0));
}

OscResult oscillatory_quadrature(const OscProblem& p, const OscOptions& opt) {
    OscResult r;
    if (p.lo == p.hi) return r;
    if (!(p.h > 0.0)) throw Error(ErrorCode::ConfigError, "h must be positive");
    const double lo = std::min(p.lo, p.hi);
    const double hi = std::max(p.lo, p.hi);
    double err = 0.0;
    std::size_t count = 0;
    cplx total = 0.0;
    const double o = p.origin;
    if (o >= hi) {
        const int panels = std::max(1, static_cast<int>(std::ceil((o - hi) / opt.max_panel)));
        const double phase_hi = -composite_gauss(p.rate, hi, o, panels, kHigh);
        total = march(p, opt, hi, lo, phase_hi, err, count);
    } else if (o <= lo) {
        const int panels = std::max(1, static_cast<int>(std::ceil((lo - o) / opt.max_panel)));
        const double phase_lo = composite_gauss(p.rate, o, lo, panels, kHigh);
        total = march(p, opt, lo, hi, phase_lo, err, count);
    } else {
        total = march(p, opt, o, hi, 0.0, err, count) + march(p, opt, o, lo, 0.0, err, count);
    }
    r.value = p.hi >= p.lo ? total : -total;
    r.error_estimate = err;
    r.panels = count;
    return r;
}

OscResult osc_integral(const PotentialModel& model, double lo, double hi, double t0, double h,
                       const std::function<cplx(double)>& f, int sign, int order, const OscOptions& opt) {
    const bool inf_lo = std::isinf(lo);
    const bool inf_hi = std::isinf(hi);
    double a = lo;
    double b = hi;
    if (inf_lo || inf_hi) {
        if (!(opt.tail_cut > 0.0)) {
            throw Error(ErrorCode::ConfigError, "infinite interval needs a positive tail_cut");
        }
        if (inf_lo) a = t0 - opt.tail_cut;
        if (inf_hi) b = t0 + opt.tail_cut;
    }
    OscProblem p;
    p.lo = a;
    p.hi = b;
    p.origin = t0;
    p.h = h;
    p.sign = sign >= 0 ? 1 : -1;
    p.rate = [&model](double t) { return 2.0 * model.eval(t); };
    p.amp = f;
    p.floor = std::pow(h, 1.0 / (order + 1.0)) / 8.0;
    p.floor_radius = 8.0 * p.floor;
    OscOptions o2 = opt;
    o2.max_panel = std::min(opt.max_panel, model.resolution_scale());
    OscResult r = oscillatory_quadrature(p, o2);

    // Integration by parts for the tails: with psi' = sign 2V/h,
    // int_c^inf g e^{i psi} = e^{i psi(c)} sum_k (-1)^{k+1} g_k(c) / (i psi'(c)),
    // g_0 = g, g_{k+1} = (g_k / (i psi'))'.
    auto tail = [&](double c, double dir) {
        const double phase = p.sign * 2.0 / h * model.integral(t0, c);
        auto ratio = [&](double t) { return f(t) / (kI * (p.sign * 2.0 * model.eval(t) / h)); };
        const double dpsi = p.sign * 2.0 * model.eval(c) / h;
        cplx acc = ratio(c);
        if (opt.tail_terms >= 2) {
            const double d = 1e-3 * std::max(1.0, std::abs(c));
            const cplx g1 = (8.0 * (ratio(c + d) - ratio(c - d)) - (ratio(c + 2 * d) - ratio(c - 2 * d))) /
                            (12.0 * d);
            acc -= g1 / (kI * dpsi);
        }
        // dir = +1 for the upper tail, -1 for the lower tail.
        return -dir * std::polar(1.0, phase) * acc;
    };
    if (inf_hi) r.value += tail(b, 1.0);
    if (inf_lo) r.value += tail(a, -1.0);
    return r;
}

}  // namespace crosslab
