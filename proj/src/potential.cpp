#include "crosslab/potential.hpp"
#include "crosslab/error.hpp"
#include "crosslab/quadrature.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace crosslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln cosh x without overflow.
double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// 1 - tanh(x)^q, accurate for large positive x.
double one_minus_tanh_pow(double x, int q) {
    if (q == 0) return 0.0;
    const double e = std::exp(-2.0 * x);
    const double one_minus = x > 0 ? 2.0 * e / (1.0 + e) : 1.0 - std::tanh(x);
    const double th = std::tanh(x);
    double geo = 0.0;
    double pw = 1.0;
    for (int i = 0; i < q; ++i) {
        geo += pw;
        pw *= th;
    }
    return one_minus * geo;
}

// int_0^x tanh^p.
double tanh_pow_antiderivative(double x, int p) {
    if (p == 0) return x;
    if (p == 1) return log_cosh(x);
    return tanh_pow_antiderivative(x, p - 2) - std::pow(std::tanh(x), p - 1) / (p - 1);
}

// int_x^inf (1 - tanh^p).
double tanh_pow_tail(double x, int p) {
    if (p == 0) return 0.0;
    if (p == 1) return x > 0 ? std::log1p(std::exp(-2.0 * x)) : -2.0 * x + std::log1p(std::exp(2.0 * x));
    return tanh_pow_tail(x, p - 2) + one_minus_tanh_pow(x, p - 1) / (p - 1);
}

// Smooth step on [0, 1]: S(x) = psi(x) / (psi(x) + psi(1 - x)), psi(x) = exp(-1/x).
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

// int_0^x (1 - S).
double smooth_ramp_integral(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 0.5;
    return composite_gauss([](double u) { return 1.0 - smooth_step(u); }, 0.0, x, 8, 20);
}

template <class T>
Jet<T> tanh_product_jet(double c, const std::vector<TanhFactor>& fs, T t0, std::size_t n) {
    Jet<T> r(n, T{c});
    for (const auto& f : fs) {
        Jet<T> arg = Jet<T>::variable(n, t0);
        arg.c[0] = T{f.scale} * (t0 - T{f.shift});
        if (n > 1) arg.c[1] = T{f.scale};
        r = r * ipow(tanh(arg), f.power);
    }
    return r;
}

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::ScaledTanhProduct: return "ScaledTanhProduct";
        case Family::PolynomialWindowed: return "PolynomialWindowed";
        case Family::LinearLZ: return "LinearLZ";
    }
    return "Unknown";
}

PotentialModel PotentialModel::scaled_tanh_product(double c, std::vector<TanhFactor> factors) {
    PotentialModel m;
    m.family_ = Family::ScaledTanhProduct;
    m.c_ = c;
    m.factors_ = std::move(factors);
    m.v_right_ = c;
    double left = c;
    for (const auto& f : m.factors_) {
        if (f.power % 2 != 0) left = -left;
    }
    m.v_left_ = left;
    m.validate();
    return m;
}

PotentialModel PotentialModel::polynomial_windowed(std::vector<double> coeffs, double window,
                                                   double ramp) {
    PotentialModel m;
    m.family_ = Family::PolynomialWindowed;
    m.coeffs_ = std::move(coeffs);
    m.window_ = window;
    m.ramp_ = ramp;
    if (!(window > 0.0) || !(ramp > 0.0) || ramp > window) {
        throw Error(ErrorCode::ConfigError, "PolynomialWindowed needs 0 < ramp <= window");
    }
    if (m.coeffs_.empty()) throw Error(ErrorCode::ConfigError, "PolynomialWindowed needs coefficients");
    const double edge = window - 0.5 * ramp;
    m.v_right_ = m.poly(edge);
    m.v_left_ = m.poly(-edge);
    m.validate();
    return m;
}

PotentialModel PotentialModel::linear_lz(double v) {
    PotentialModel m;
    m.family_ = Family::LinearLZ;
    m.c_ = v;
    if (!(v > 0.0)) throw Error(ErrorCode::ConfigError, "LinearLZ needs v > 0");
    m.v_right_ = kInf;
    m.v_left_ = -kInf;
    return m;
}

void PotentialModel::validate() const {
    if (family_ == Family::ScaledTanhProduct) {
        if (factors_.empty()) throw Error(ErrorCode::ConfigError, "ScaledTanhProduct needs factors");
        for (const auto& f : factors_) {
            if (f.power < 1) throw Error(ErrorCode::ConfigError, "tanh power must be >= 1");
            if (!(f.scale > 0.0)) throw Error(ErrorCode::ConfigError, "tanh scale must be > 0");
        }
    }
    if (!(v_right_ > 0.0)) throw Error(ErrorCode::ConfigError, "V_r must be positive");
    if (v_left_ == 0.0) throw Error(ErrorCode::ConfigError, "V_l must be nonzero");
}

double PotentialModel::poly(double x) const {
    double r = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
    return r;
}

double PotentialModel::window_map(double t) const {
    const double a = std::abs(t);
    const double core = window_ - ramp_;
    const double sgn = t < 0 ? -1.0 : 1.0;
    if (a <= core) return t;
    if (a >= window_) return sgn * (core + 0.5 * ramp_);
    return sgn * (core + ramp_ * smooth_ramp_integral((a - core) / ramp_));
}

Jet<double> PotentialModel::window_map_jet(double t, std::size_t n) const {
    const double a = std::abs(t);
    const double core = window_ - ramp_;
    if (a <= core) return Jet<double>::variable(n, t);
    if (a >= window_) return Jet<double>(n, window_map(t));
    const double sgn = t < 0 ? -1.0 : 1.0;
    Jet<double> x = Jet<double>::variable(n, (a - core) / ramp_);
    if (n > 1) x.c[1] = sgn / ramp_;
    Jet<double> one_minus_x = Jet<double>(n, 1.0) - x;
    Jet<double> p1 = exp(-1.0 * reciprocal(x));
    Jet<double> p2 = exp(-1.0 * reciprocal(one_minus_x));
    Jet<double> s = p1 * reciprocal(p1 + p2);
    Jet<double> g_prime = Jet<double>(n, 1.0) - s;
    return integrate(g_prime, window_map(t));
}

double PotentialModel::eval(double t) const {
    switch (family_) {
        case Family::LinearLZ: return c_ * t;
        case Family::PolynomialWindowed: return poly(window_map(t));
        case Family::ScaledTanhProduct: {
            double r = c_;
            for (const auto& f : factors_) {
                const double th = std::tanh(f.scale * (t - f.shift));
                double p = 1.0;
                for (int i = 0; i < f.power; ++i) p *= th;
                r *= p;
            }
            return r;
        }
    }
    return 0.0;
}

cplx PotentialModel::eval(cplx t) const {
    switch (family_) {
        case Family::LinearLZ: return c_ * t;
        case Family::PolynomialWindowed: {
            if (std::abs(t.real()) > window_ - ramp_) {
                throw Error(ErrorCode::TurningPointFailure, "complex argument outside analytic core");
            }
            cplx r = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * t + *it;
            return r;
        }
        case Family::ScaledTanhProduct: {
            cplx r = c_;
            for (const auto& f : factors_) {
                const cplx th = std::tanh(f.scale * (t - f.shift));
                cplx p = 1.0;
                for (int i = 0; i < f.power; ++i) p *= th;
                r *= p;
            }
            return r;
        }
    }
    return 0.0;
}

cplx PotentialModel::derivative(cplx t) const {
    switch (family_) {
        case Family::LinearLZ: return c_;
        case Family::PolynomialWindowed: {
            if (std::abs(t.real()) > window_ - ramp_) {
                throw Error(ErrorCode::TurningPointFailure, "complex argument outside analytic core");
            }
            cplx r = 0.0;
            for (std::size_t i = coeffs_.size(); i-- > 1;) r = r * t + static_cast<double>(i) * coeffs_[i];
            return r;
        }
        case Family::ScaledTanhProduct: return tanh_product_jet<cplx>(c_, factors_, t, 2).c[1];
    }
    return 0.0;
}

Jet<double> PotentialModel::jet(double t, std::size_t n) const {
    switch (family_) {
        case Family::LinearLZ: {
            Jet<double> j(n, c_ * t);
            if (n > 1) j.c[1] = c_;
            return j;
        }
        case Family::PolynomialWindowed: {
            const Jet<double> g = window_map_jet(t, n);
            Jet<double> r(n, 0.0);
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = (r * g) + *it;
            return r;
        }
        case Family::ScaledTanhProduct: return tanh_product_jet<double>(c_, factors_, t, n);
    }
    return Jet<double>(n);
}

double PotentialModel::derivative(double t, int k) const {
    return jet(t, static_cast<std::size_t>(k) + 1).derivative(static_cast<std::size_t>(k));
}

double PotentialModel::resolution_scale() const {
    switch (family_) {
        case Family::LinearLZ: return kInf;
        case Family::PolynomialWindowed: return 0.25 * ramp_;
        case Family::ScaledTanhProduct: {
            double s = 0.0;
            for (const auto& f : factors_) s = std::max(s, f.scale);
            return 0.5 / s;
        }
    }
    return 1.0;
}

double PotentialModel::integral(double a, double b) const {
    if (a == b) return 0.0;
    if (a > b) return -integral(b, a);
    switch (family_) {
        case Family::LinearLZ: return 0.5 * c_ * (b * b - a * a);
        case Family::PolynomialWindowed: {
            const double core = window_ - ramp_;
            const std::vector<double> cuts{-window_, -core, core, window_};
            auto prim = [&](double x) {
                double r = 0.0;
                for (std::size_t i = coeffs_.size(); i-- > 0;) r = r * x + coeffs_[i] / (i + 1.0);
                return r * x;
            };
            double total = 0.0;
            double lo = a;
            auto piece = [&](double p, double q) {
                if (q <= p) return 0.0;
                const double mid = 0.5 * (p + q);
                const double am = std::abs(mid);
                if (am <= core) return prim(q) - prim(p);
                if (am >= window_) return eval(mid) * (q - p);
                return composite_gauss([this](double t) { return eval(t); }, p, q, 16, 20);
            };
            for (double cut : cuts) {
                if (cut > lo && cut < b) {
                    total += piece(lo, cut);
                    lo = cut;
                }
            }
            return total + piece(lo, b);
        }
        case Family::ScaledTanhProduct: {
            if (factors_.size() == 1) {
                const auto& f = factors_.front();
                return c_ / f.scale *
                       (tanh_pow_antiderivative(f.scale * (b - f.shift), f.power) -
                        tanh_pow_antiderivative(f.scale * (a - f.shift), f.power));
            }
            const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / resolution_scale())));
            return composite_gauss([this](double t) { return eval(t); }, a, b, panels, 20);
        }
    }
    return 0.0;
}

double PotentialModel::tail_integral(Side side, double t) const {
    switch (family_) {
        case Family::LinearLZ:
            throw Error(ErrorCode::ConfigError, "LinearLZ has no integrable tails");
        case Family::PolynomialWindowed: {
            if (side == Side::Right) {
                if (t >= window_) return 0.0;
                return integral(t, window_) - v_right_ * (window_ - t);
            }
            if (t <= -window_) return 0.0;
            return integral(-window_, t) - v_left_ * (t + window_);
        }
        case Family::ScaledTanhProduct: {
            if (factors_.size() == 1) {
                const auto& f = factors_.front();
                const double x = f.scale * (t - f.shift);
                if (side == Side::Right) return -c_ / f.scale * tanh_pow_tail(x, f.power);
                const double sgn = (f.power % 2 == 0) ? 1.0 : -1.0;
                return -sgn * c_ / f.scale * tanh_pow_tail(-x, f.power);
            }
            if (side == Side::Right) {
                return integrate_to_infinity([&](double u) { return eval(u) - v_right_; }, t);
            }
            return integrate_to_infinity([&](double u) { return eval(2.0 * t - u) - v_left_; }, t);
        }
    }
    return 0.0;
}

double PotentialModel::tail_decay_rate() const {
    switch (family_) {
        case Family::LinearLZ: return 0.0;
        case Family::PolynomialWindowed: return kInf;
        case Family::ScaledTanhProduct: {
            double s = kInf;
            for (const auto& f : factors_) s = std::min(s, f.scale);
            return 2.0 * s;
        }
    }
    return 0.0;
}

double PotentialModel::tail_anchor(Side side, double threshold) const {
    switch (family_) {
        case Family::LinearLZ:
            throw Error(ErrorCode::ConfigError, "LinearLZ has no tail anchor");
        case Family::PolynomialWindowed: return side == Side::Right ? window_ : -window_;
        case Family::ScaledTanhProduct: {
            const double dir = side == Side::Right ? 1.0 : -1.0;
            const double tail = side == Side::Right ? v_right_ : v_left_;
            double start = 0.0;
            double smax = 0.0;
            for (const auto& f : factors_) {
                start = side == Side::Right ? std::max(start, f.shift) : std::min(start, f.shift);
                smax = std::max(smax, f.scale);
            }
            auto resid = [&](double t) { return std::abs(eval(t) - tail); };
            double lo = start;
            double step = 1.0 / smax;
            double hi = lo + dir * step;
            while (resid(hi) >= threshold) {
                lo = hi;
                step *= 2.0;
                hi = lo + dir * step;
                if (std::abs(hi) > 1e6) throw Error(ErrorCode::ConfigError, "tail anchor not found");
            }
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (resid(mid) < threshold) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return hi;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------

RegimeSplit make_split(const CrossingCatalog& cat, const std::vector<Regime>& regime) {
    if (regime.size() != cat.size()) {
        throw Error(ErrorCode::ConfigError, "regime assignment size mismatch");
    }
    RegimeSplit s;
    s.regime = regime;
    s.m_sharp = std::numeric_limits<int>::max();
    for (std::size_t k = 0; k < cat.size(); ++k) {
        const int m = cat.crossings[k].m;
        if (regime[k] == Regime::NonAdiabatic) {
            s.m_flat = std::max(s.m_flat, m);
        } else {
            s.m_sharp = std::min(s.m_sharp, m);
            if (m % 2 != 0) s.odd_sharp.push_back(static_cast<int>(k));
        }
    }
    if (s.m_sharp == std::numeric_limits<int>::max()) s.m_sharp = 0;
    for (std::size_t k = 0; k < cat.size(); ++k) {
        const int m = cat.crossings[k].m;
        if (regime[k] == Regime::NonAdiabatic && m == s.m_flat) s.lambda_flat.push_back(static_cast<int>(k));
        if (regime[k] == Regime::Adiabatic && m == s.m_sharp) s.lambda_sharp.push_back(static_cast<int>(k));
    }
    return s;
}

namespace {

struct OrderInfo {
    int m = 0;
    double v = 0.0;
};

OrderInfo zero_order(const PotentialModel& model, double t, int max_order) {
    const Jet<double> j = model.jet(t, static_cast<std::size_t>(max_order) + 1);
    for (int l = 1; l <= max_order; ++l) {
        const double d = j.derivative(static_cast<std::size_t>(l));
        if (std::abs(d) < 1e-9) continue;
        const double thr = 1e-9 * std::max(1.0, std::abs(d));
        bool lower_vanish = true;
        for (int q = 0; q < l; ++q) {
            if (std::abs(j.derivative(static_cast<std::size_t>(q))) >= thr) lower_vanish = false;
        }
        if (!lower_vanish) return {0, 0.0};
        return {l, d};
    }
    throw Error(ErrorCode::ZeroOrderUndetermined,
                "all derivatives up to order " + std::to_string(max_order) + " vanish");
}

// Newton on V^{(m-1)} so that multiple roots are located to full precision.
double refine_root(const PotentialModel& model, double t, int m) {
    for (int it = 0; it < 20; ++it) {
        const Jet<double> j = model.jet(t, static_cast<std::size_t>(m) + 1);
        const double f = j.derivative(static_cast<std::size_t>(m - 1));
        const double df = j.derivative(static_cast<std::size_t>(m));
        if (df == 0.0) break;
        const double dt = f / df;
        t -= dt;
        if (std::abs(dt) < 1e-16 * std::max(1.0, std::abs(t))) break;
    }
    return t;
}

double bracket_root(const std::function<double(double)>& f, double a, double b) {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(52),
                                                     iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

CrossingCatalog find_crossings(const PotentialModel& model, double lo, double hi, const FindOptions& opt) {
    if (!(hi > lo)) throw Error(ErrorCode::ConfigError, "empty search interval");
    const int n = std::max(opt.samples, 16);
    const double dx = (hi - lo) / n;
    std::vector<double> ts(n + 1);
    std::vector<double> vs(n + 1);
    std::vector<double> ds(n + 1);
    double vmax = 0.0;
    for (int i = 0; i <= n; ++i) {
        ts[i] = lo + i * dx;
        const Jet<double> j = model.jet(ts[i], 2);
        vs[i] = j.c[0];
        ds[i] = j.c[1];
        vmax = std::max(vmax, std::abs(vs[i]));
    }
    auto V = [&](double t) { return model.eval(t); };
    auto dV = [&](double t) { return model.jet(t, 2).c[1]; };

    std::vector<double> cand;
    for (int i = 0; i < n; ++i) {
        if (vs[i] == 0.0) {
            cand.push_back(ts[i]);
        } else if (vs[i] * vs[i + 1] < 0.0) {
            cand.push_back(bracket_root(V, ts[i], ts[i + 1]));
        }
        if (ds[i] != 0.0 && ds[i] * ds[i + 1] < 0.0) {
            const double tc = bracket_root(dV, ts[i], ts[i + 1]);
            if (std::abs(model.eval(tc)) < 1e-8 * std::max(1.0, vmax)) cand.push_back(tc);
        }
    }
    if (vs[n] == 0.0) cand.push_back(ts[n]);

    std::vector<Crossing> found;
    for (double t : cand) {
        double tc = t;
        OrderInfo info{};
        for (int pass = 0; pass < 3; ++pass) {
            info = zero_order(model, tc, opt.max_order);
            if (info.m == 0) break;
            tc = refine_root(model, tc, info.m);
        }
        if (info.m == 0) continue;
        info = zero_order(model, tc, opt.max_order);
        if (info.m == 0) continue;
        bool dup = false;
        for (const auto& c : found) {
            if (std::abs(c.t - tc) < 1e-7) dup = true;
        }
        if (!dup) found.push_back({tc, info.m, info.v});
    }
    std::sort(found.begin(), found.end(), [](const Crossing& a, const Crossing& b) { return a.t > b.t; });

    CrossingCatalog cat;
    cat.crossings = found;
    int s = 0;
    for (const auto& c : found) {
        s += c.m;
        cat.sigma.push_back(s);
        cat.m_star = std::max(cat.m_star, c.m);
    }
    for (std::size_t k = 0; k < found.size(); ++k) {
        if (found[k].m == cat.m_star) cat.lambda_star.push_back(static_cast<int>(k));
    }

    // Sign pattern: (-1)^{sigma_k} V > 0 on (t_{k+1}, t_k).
    auto check = [&](double t, int sigma) {
        const double v = model.eval(t);
        if (((sigma % 2 == 0) ? v : -v) <= 0.0) {
            throw Error(ErrorCode::BracketingFailed, "sign pattern inconsistent near t=" + std::to_string(t));
        }
    };
    if (!found.empty()) {
        check(std::min(hi, found.front().t + 0.5 * (hi - found.front().t)), 0);
        for (std::size_t k = 0; k + 1 < found.size(); ++k) {
            check(0.5 * (found[k].t + found[k + 1].t), cat.sigma[k]);
        }
        check(std::max(lo, found.back().t - 0.5 * (found.back().t - lo)), cat.sigma_n());
    }
    return cat;
}

double area_between(const CrossingCatalog& cat, const PotentialModel& model, std::size_t j, std::size_t k) {
    if (j > k || k >= cat.size()) throw Error(ErrorCode::ConfigError, "area_between needs j <= k < n");
    double total = 0.0;
    for (std::size_t i = j; i < k; ++i) {
        total += std::abs(model.integral(cat.crossings[i + 1].t, cat.crossings[i].t));
    }
    return 2.0 * total;
}

double area_between_points(const PotentialModel& model, double a, double b) {
    if (a == b) return 0.0;
    if (a > b) std::swap(a, b);
    const int n = 2000;
    const double dx = (b - a) / n;
    std::vector<double> cuts{a};
    double prev = model.eval(a);
    for (int i = 1; i <= n; ++i) {
        const double t = a + i * dx;
        const double v = model.eval(t);
        if (prev * v < 0.0) {
            cuts.push_back(bracket_root([&](double s) { return model.eval(s); }, t - dx, t));
        }
        prev = v;
    }
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += std::abs(model.integral(cuts[i], cuts[i + 1]));
    return 2.0 * total;
}

RegularizedAction regularized_action(const PotentialModel& model, const CrossingCatalog& cat, Side side,
                                     double anchor, bool require_nonvanishing_tail, double tail_floor) {
    RegularizedAction r;
    if (side == Side::Right) {
        if (!cat.crossings.empty() && anchor <= cat.crossings.front().t) {
            throw Error(ErrorCode::AnchorInsideCrossings, "right anchor must lie beyond t_1");
        }
        r.tail = -model.tail_integral(Side::Right, anchor);
        r.value = model.v_right() * anchor + r.tail;
    } else {
        if (!cat.crossings.empty() && anchor >= cat.crossings.back().t) {
            throw Error(ErrorCode::AnchorInsideCrossings, "left anchor must lie before t_n");
        }
        r.tail = model.tail_integral(Side::Left, anchor);
        r.value = model.v_left() * anchor + r.tail;
    }
    if (require_nonvanishing_tail && std::abs(r.tail) <= tail_floor) {
        throw Error(ErrorCode::TailIntegralVanishes, "tail integral vanishes at the anchor");
    }
    return r;
}

EffectivePotential::EffectivePotential(const CrossingCatalog& cat, const RegimeSplit& split) {
    const auto& odd = split.odd_sharp;
    n_odd_ = static_cast<int>(odd.size());
    for (std::size_t l = 0; l < odd.size(); l += 2) {
        const double hi = cat.crossings[static_cast<std::size_t>(odd[l])].t;
        const double lo =
            l + 1 < odd.size() ? cat.crossings[static_cast<std::size_t>(odd[l + 1])].t : -kInf;
        flips_.emplace_back(lo, hi);
    }
}

int EffectivePotential::sign(double t) const {
    for (const auto& [lo, hi] : flips_) {
        if (t > lo && t < hi) return -1;
    }
    return 1;
}

double EffectivePotential::integral(const PotentialModel& model, double a, double b) const {
    if (a > b) return -integral(model, b, a);
    std::vector<double> cuts{a};
    for (const auto& [lo, hi] : flips_) {
        if (lo > a && lo < b) cuts.push_back(lo);
        if (hi > a && hi < b) cuts.push_back(hi);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        total += sign(mid) * model.integral(cuts[i], cuts[i + 1]);
    }
    return total;
}

// ---------------------------------------------------------------------------

double local_decay_constant(int m, double v) {
    const double beta = boost::math::beta(1.0 / (2.0 * m), 1.5);
    return 2.0 * std::pow(factorial(m) / std::abs(v), 1.0 / m) * std::sin(std::numbers::pi / (2.0 * m)) *
           beta / (2.0 * m);
}

cplx turning_point(const PotentialModel& model, const Crossing& x, int j, double eps,
                   const TurningPointOptions& opt) {
    const int m = x.m;
    const double rho = std::pow(factorial(m) * eps / std::abs(x.v), 1.0 / m);
    const cplx seed = x.t + rho * std::polar(1.0, std::numbers::pi * (2.0 * j - 1.0) / (2.0 * m));
    const double scale = eps * eps;
    auto F = [&](cplx t) {
        const cplx v = model.eval(t);
        return v * v + scale;
    };
    cplx z = seed;
    cplx f = F(z);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (std::abs(f) <= opt.tol * scale) {
            if (!(z.imag() > 0.0) || std::abs(z - seed) > rho) {
                throw Error(ErrorCode::NewtonDiverged, "turning point left the seed neighbourhood");
            }
            return z;
        }
        const cplx df = 2.0 * model.eval(z) * model.derivative(z);
        if (df == 0.0) break;
        cplx step = f / df;
        // Simple root: a step at rounding level means |f| has hit its evaluation floor.
        if (std::abs(step) <= 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(z) + rho)) {
            if (!(z.imag() > 0.0) || std::abs(z - seed) > rho) break;
            return z;
        }
        cplx zn = z - step;
        cplx fn = F(zn);
        int damp = 0;
        while (std::abs(fn) > std::abs(f) && damp < 30) {
            step *= 0.5;
            zn = z - step;
            fn = F(zn);
            ++damp;
        }
        z = zn;
        f = fn;
    }
    if (std::abs(f) <= opt.tol * scale && z.imag() > 0.0) return z;
    throw Error(ErrorCode::NewtonDiverged, "turning point Newton iteration did not converge");
}

cplx turning_action(const PotentialModel& model, const Crossing& x, cplx zeta, double eps) {
    const GaussRule& g = gauss_legendre(16);
    const int panels = 64;
    const cplx dz = zeta - x.t;
    // s = 1 - u^2 removes the square-root endpoint singularity; march in increasing s.
    struct Node {
        double s;
        double weight;  // includes 2u du
    };
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(panels) * g.x.size());
    for (int p = 0; p < panels; ++p) {
        const double lo = static_cast<double>(p) / panels;
        const double w = 1.0 / panels;
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const double u = lo + 0.5 * w * (1.0 + g.x[i]);
            nodes.push_back({1.0 - u * u, 0.5 * w * g.w[i] * 2.0 * u});
        }
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.s < b.s; });
    cplx prev = eps;
    cplx sum = 0.0;
    for (const auto& nd : nodes) {
        const cplx t = x.t + nd.s * dz;
        const cplx v = model.eval(t);
        const cplx F = v * v + eps * eps;
        if (nd.s < 0.9 && std::abs(F) < 1e-3 * eps * eps) {
            throw Error(ErrorCode::BranchAmbiguity, "V^2 + eps^2 vanishes inside the action segment");
        }
        cplx w = std::sqrt(F);
        if (std::abs(w - prev) > std::abs(w + prev)) w = -w;
        prev = w;
        sum += nd.weight * w;
    }
    return 2.0 * dz * sum;
}

TurningPointPair turning_points(const PotentialModel& model, const CrossingCatalog& cat, std::size_t k,
                                double eps, const TurningPointOptions& opt) {
    if (k >= cat.size()) throw Error(ErrorCode::ConfigError, "crossing index out of range");
    const Crossing& x = cat.crossings[k];
    const int m = x.m;
    const double expo = (m + 1.0) / m;
    TurningPointPair r;
    try {
        r.zeta_1 = turning_point(model, x, 1, eps, opt);
        r.zeta_m = m == 1 ? r.zeta_1 : turning_point(model, x, m, eps, opt);
        r.action_1 = turning_action(model, x, r.zeta_1, eps);
        r.action_m = m == 1 ? r.action_1 : turning_action(model, x, r.zeta_m, eps);
        const cplx half_1 = turning_action(model, x, turning_point(model, x, 1, 0.5 * eps, opt), 0.5 * eps);
        r.scaling_exponent = std::log2(r.action_1.imag() / half_1.imag());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NewtonDiverged || e.code() == ErrorCode::BranchAmbiguity) throw;
        throw Error(ErrorCode::TurningPointFailure, e.what());
    }
    if (!(r.action_1.imag() > 0.0) || !(r.action_m.imag() > 0.0)) {
        throw Error(ErrorCode::TurningPointFailure, "action with non-positive imaginary part");
    }
    r.a_1 = r.action_1.imag() / std::pow(eps, expo);
    r.a_m = r.action_m.imag() / std::pow(eps, expo);
    r.a = std::min(r.a_1, r.a_m);
    r.a_limit = local_decay_constant(m, x.v);
    return r;
}

}  // namespace crosslab
