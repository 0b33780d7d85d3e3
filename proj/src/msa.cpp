#include "crosslab/msa.hpp"
#include "crosslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crosslab {

namespace {

std::size_t pow2_plus_one(std::size_t n) {
    std::size_t p = 1;
    while (p + 1 < n) p <<= 1;
    return p + 1;
}

// Fourth-order derivative on a uniform grid, one-sided at the two ends of each side.
std::vector<cplx> derivative(const std::vector<cplx>& f, double dt) {
    const std::size_t n = f.size();
    std::vector<cplx> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n) {
            d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dt);
        } else if (i < 2) {
            d[i] = (-25.0 * f[i] + 48.0 * f[i + 1] - 36.0 * f[i + 2] + 16.0 * f[i + 3] - 3.0 * f[i + 4]) /
                   (12.0 * dt);
        } else {
            d[i] = (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4]) /
                   (12.0 * dt);
        }
    }
    return d;
}

double sup(const std::vector<cplx>& f) {
    double m = 0.0;
    for (const cplx& z : f) m = std::max(m, std::abs(z));
    return m;
}

// exp(s 2i Phi / h) on the grid.
std::vector<cplx> phase_weight(const MsaGrid& g, int s) {
    std::vector<cplx> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx u = s > 0 ? std::conj(g.up[i]) : g.up[i];
        w[i] = u * u;
    }
    return w;
}

void check_grid(const MsaGrid& g) {
    if (g.size() < 5) throw Error(ErrorCode::ConfigError, "MSA grid needs at least 5 nodes");
}

}  // namespace

std::size_t MsaGrid::index_of(double x) const {
    if (x <= lo) return 0;
    if (x >= hi) return size() - 1;
    const double k = std::round((x - lo) / dt());
    return std::min(size() - 1, static_cast<std::size_t>(k));
}

MsaGrid MsaGrid::coarsened() const {
    if (size() % 2 == 0) throw Error(ErrorCode::ConfigError, "coarsening needs an odd node count");
    MsaGrid c;
    c.lo = lo;
    c.hi = hi;
    c.t0 = t0;
    c.h = h;
    for (std::size_t i = 0; i < size(); i += 2) {
        c.t.push_back(t[i]);
        c.phi.push_back(phi[i]);
        c.up.push_back(up[i]);
    }
    return c;
}

MsaGrid make_msa_grid(const PotentialModel& model, double t0, double lo, double hi, double h,
                      const MsaOptions& opt) {
    if (!(hi > lo)) throw Error(ErrorCode::ConfigError, "empty MSA interval");
    if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "h must be positive");
    // Phase budget from a coarse scan of |V|.
    double vmax = 0.0;
    constexpr int kScan = 2000;
    for (int i = 0; i <= kScan; ++i) vmax = std::max(vmax, std::abs(model.eval(lo + (hi - lo) * i / kScan)));
    const double span = 2.0 * vmax * (hi - lo) / h;
    const double want = std::max(static_cast<double>(opt.min_points), span / opt.phase_step);
    if (want > 1e8) throw Error(ErrorCode::QuadratureTolExceeded, "MSA grid would exceed 1e8 nodes");
    const std::size_t n = pow2_plus_one(static_cast<std::size_t>(std::ceil(want)));

    MsaGrid g;
    g.lo = lo;
    g.hi = hi;
    g.t0 = t0;
    g.h = h;
    g.t.resize(n);
    g.phi.resize(n);
    g.up.resize(n);
    const double dt = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.t[i] = lo + dt * static_cast<double>(i);
    // Phi by exact panel integrals accumulated from the node nearest t0.
    const std::size_t i0 = g.index_of(std::clamp(t0, lo, hi));
    g.phi[i0] = model.integral(t0, g.t[i0]);
    for (std::size_t i = i0; i + 1 < n; ++i) g.phi[i + 1] = g.phi[i] + model.integral(g.t[i], g.t[i + 1]);
    for (std::size_t i = i0; i > 0; --i) g.phi[i - 1] = g.phi[i] - model.integral(g.t[i - 1], g.t[i]);
    for (std::size_t i = 0; i < n; ++i) g.up[i] = std::polar(1.0, -g.phi[i] / h);
    return g;
}

std::vector<cplx> cumulative_integral(const std::vector<cplx>& g, double dt, std::size_t ia) {
    const std::size_t n = g.size();
    if (n < 4) throw Error(ErrorCode::ConfigError, "cumulative integral needs at least 4 nodes");
    const double w = dt / 24.0;
    auto panel = [&](std::size_t i) -> cplx {
        if (i == 0) return w * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
        if (i == n - 2) return w * (9.0 * g[n - 1] + 19.0 * g[n - 2] - 5.0 * g[n - 3] + g[n - 4]);
        return w * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]);
    };
    std::vector<cplx> c(n);
    c[ia] = 0.0;
    for (std::size_t i = ia; i + 1 < n; ++i) c[i + 1] = c[i] + panel(i);
    for (std::size_t i = ia; i > 0; --i) c[i - 1] = c[i] - panel(i - 1);
    return c;
}

std::vector<cplx> apply_K(const MsaGrid& g, int sign, double a, const std::vector<cplx>& f) {
    check_grid(g);
    if (f.size() != g.size()) throw Error(ErrorCode::ConfigError, "sample count does not match grid");
    if (a < g.lo || a > g.hi) throw Error(ErrorCode::ConfigError, "base point outside the MSA interval");
    std::vector<cplx> integrand(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx u = sign > 0 ? g.up[i] : std::conj(g.up[i]);
        integrand[i] = f[i] * std::conj(u);
    }
    std::vector<cplx> c = cumulative_integral(integrand, g.dt(), g.index_of(a));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx u = sign > 0 ? g.up[i] : std::conj(g.up[i]);
        c[i] *= kI / g.h * u;
    }
    return c;
}

std::vector<cplx> k_cross_amplitude(const MsaGrid& g, int sign, double a, const std::vector<cplx>& f) {
    check_grid(g);
    if (f.size() != g.size()) throw Error(ErrorCode::ConfigError, "sample count does not match grid");
    if (a < g.lo || a > g.hi) throw Error(ErrorCode::ConfigError, "base point outside the MSA interval");
    const std::vector<cplx> w = phase_weight(g, sign);
    std::vector<cplx> integrand(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) integrand[i] = w[i] * f[i];
    std::vector<cplx> c = cumulative_integral(integrand, g.dt(), g.index_of(a));
    for (cplx& z : c) z *= kI / g.h;
    return c;
}

double q_norm(const MsaGrid& g, const std::vector<cplx>& f, double q) {
    check_grid(g);
    return sup(f) + std::pow(g.h, q) * sup(derivative(f, g.dt()));
}

Vec2 MsaSolution::value(std::size_t i) const {
    return {grid.up[i] * amp_a[i], std::conj(grid.up[i]) * amp_b[i]};
}

MsaSolution msa_solution(const MsaGrid& grid, double eps, MsaWhich which, double a_plus, double a_minus,
                         int depth, double mu) {
    check_grid(grid);
    if (depth < 1) throw Error(ErrorCode::ConfigError, "MSA depth must be at least 1");
    MsaSolution s;
    s.grid = grid;
    s.which = which;
    s.a_plus = a_plus;
    s.a_minus = a_minus;
    s.depth = depth;
    s.tail_bound = std::pow(mu, 2.0 * (depth + 1));
    const std::size_t n = grid.size();
    std::vector<cplx> a(n, 0.0);
    std::vector<cplx> b(n, 0.0);
    // Leading amplitude, then alternate the two cross operators.
    std::vector<cplx> lead(n, 1.0);
    std::vector<cplx>& sum_lead = which == MsaWhich::W1 ? a : b;
    std::vector<cplx>& sum_other = which == MsaWhich::W1 ? b : a;
    // W1: b_k = -eps k-(a_k) based at a-, a_{k+1} = -eps k+(b_k) based at a+. W2 is the mirror.
    const int s_first = which == MsaWhich::W1 ? -1 : +1;
    const double base_first = which == MsaWhich::W1 ? a_minus : a_plus;
    const double base_second = which == MsaWhich::W1 ? a_plus : a_minus;
    double prev_lead = 0.0;
    double prev_other = 0.0;
    for (int k = 0; k <= depth; ++k) {
        for (std::size_t i = 0; i < n; ++i) sum_lead[i] += lead[i];
        std::vector<cplx> other = k_cross_amplitude(grid, s_first, base_first, lead);
        for (cplx& z : other) z *= -eps;
        for (std::size_t i = 0; i < n; ++i) sum_other[i] += other[i];
        const double sl = sup(lead);
        const double so = sup(other);
        s.term_sup.push_back(sl);
        s.term_sup.push_back(so);
        if (k >= 1 && ((prev_lead > 0.0 && sl >= prev_lead) || (prev_other > 0.0 && so >= prev_other))) {
            throw Error(ErrorCode::SeriesNotContracting,
                        "term " + std::to_string(k) + " does not decrease (mu = " + std::to_string(mu) + ")");
        }
        prev_lead = sl;
        prev_other = so;
        if (k == depth) break;
        lead = k_cross_amplitude(grid, -s_first, base_second, other);
        for (cplx& z : lead) z *= -eps;
    }
    s.amp_a = std::move(a);
    s.amp_b = std::move(b);

    // Residual of A' = -(i eps/h) e^{2i Phi/h} B and B' = -(i eps/h) e^{-2i Phi/h} A.
    const std::vector<cplx> da = derivative(s.amp_a, grid.dt());
    const std::vector<cplx> db = derivative(s.amp_b, grid.dt());
    const std::vector<cplx> wp = phase_weight(grid, +1);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx ra = da[i] + kI * eps / grid.h * wp[i] * s.amp_b[i];
        const cplx rb = db[i] + kI * eps / grid.h * std::conj(wp[i]) * s.amp_a[i];
        res = std::max({res, std::abs(ra), std::abs(rb)});
    }
    s.residual = grid.h * res;
    return s;
}

std::pair<double, double> msa_interval(const PotentialModel& model, const CrossingCatalog& cat, std::size_t k) {
    if (k >= cat.size()) throw Error(ErrorCode::ConfigError, "crossing index out of range");
    const Crossing& x = cat.crossings[k];
    // Crossings are ordered t_1 > t_2 > ..., so index k-1 is to the right.
    double right;
    double left;
    const double local = std::pow(std::tgamma(x.m + 1.0) / std::abs(x.v), 1.0 / (x.m + 1.0));
    if (k > 0) {
        right = x.t + 0.5 * (cat.crossings[k - 1].t - x.t);
    } else if (model.has_finite_tails()) {
        right = x.t + 0.5 * (std::max(model.tail_anchor(Side::Right), x.t + 2.0 * local) - x.t);
    } else {
        right = x.t + 5.0 * local;
    }
    if (k + 1 < cat.size()) {
        left = x.t - 0.5 * (x.t - cat.crossings[k + 1].t);
    } else if (model.has_finite_tails()) {
        left = x.t - 0.5 * (x.t - std::min(model.tail_anchor(Side::Left), x.t - 2.0 * local));
    } else {
        left = x.t - 5.0 * local;
    }
    const double d = std::min(right - x.t, x.t - left);
    return {x.t - d, x.t + d};
}

namespace {

Mat2 msa_T(const MsaGrid& g, double eps, double ell, int depth, double mu, double* bound) {
    const MsaSolution w1 = msa_solution(g, eps, MsaWhich::W1, ell, ell, depth, mu);
    const MsaSolution w2 = msa_solution(g, eps, MsaWhich::W2, ell, ell, depth, mu);
    if (bound) *bound = w1.tail_bound;
    const std::size_t r = g.size() - 1;
    return {w1.amp_a[r], w2.amp_a[r], w1.amp_b[r], w2.amp_b[r]};
}

}  // namespace

ConnectionResult connection_T_numeric(const PotentialModel& model, const CrossingCatalog& cat, std::size_t k,
                                      double eps, double h, double ell, double r, const MsaOptions& opt,
                                      const PropagatorOptions& prop) {
    if (k >= cat.size()) throw Error(ErrorCode::ConfigError, "crossing index out of range");
    const Crossing& x = cat.crossings[k];
    if (std::isnan(ell) || std::isnan(r)) {
        const auto iv = msa_interval(model, cat, k);
        if (std::isnan(ell)) ell = iv.first;
        if (std::isnan(r)) r = iv.second;
    }
    if (!(ell < x.t && x.t < r)) throw Error(ErrorCode::ConfigError, "need l < t_k < r");
    for (std::size_t j = 0; j < cat.size(); ++j) {
        if (j != k && cat.crossings[j].t >= ell && cat.crossings[j].t <= r) {
            throw Error(ErrorCode::ConfigError, "another crossing lies in [l, r]");
        }
    }
    ConnectionResult out;
    out.mu = eps * std::pow(h, -static_cast<double>(x.m) / (x.m + 1.0));
    const MsaGrid g = make_msa_grid(model, x.t, ell, r, h, opt);
    out.points = g.size();
    out.t_msa = msa_T(g, eps, ell, opt.depth, out.mu, &out.series_bound);
    if (opt.doubling_check) {
        const Mat2 coarse = msa_T(g.coarsened(), eps, ell, opt.depth, out.mu, nullptr);
        out.grid_error = max_abs(out.t_msa - coarse);
    }
    const Mat2 m = fundamental_matrix(model, eps, h, ell, r, prop);
    const cplx up_r = std::polar(1.0, -model.integral(x.t, r) / h);
    const cplx up_l = std::polar(1.0, -model.integral(x.t, ell) / h);
    out.t_prop = Mat2::diag(std::conj(up_r), up_r) * m * Mat2::diag(up_l, std::conj(up_l));
    return out;
}

}  // namespace crosslab
