#include "crosslab/predictor.hpp"
#include "crosslab/error.hpp"
#include "crosslab/oscillatory.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace crosslab {

double gamma_star(int m) {
    if (m < 1) throw Error(ErrorCode::ConfigError, "order must be at least 1");
    const double mp = m + 1.0;
    const double g = std::tgamma((m + 2.0) / mp);
    double v = 4.0 * std::pow(std::tgamma(mp + 1.0) / 2.0, 2.0 / mp) * g * g;
    if (m % 2 == 0) {
        const double c = std::cos(std::numbers::pi / (2.0 * mp));
        v *= c * c;
    }
    return v;
}

std::string to_string(ThetaConvention c) { return c == ThetaConvention::Theorem ? "theorem" : "proof"; }

ThetaConvention theta_from_string(const std::string& s) {
    if (s == "theorem") return ThetaConvention::Theorem;
    if (s == "proof") return ThetaConvention::ProofDisplay;
    throw Error(ErrorCode::ConfigError, "unknown theta convention '" + s + "'");
}

double theta_jk(int m, double v_j, double v_k, ThetaConvention c) {
    if (m % 2 == 0 || (v_j > 0.0) == (v_k > 0.0)) return 0.0;
    const double base = c == ThetaConvention::Theorem ? std::numbers::pi / (m + 1.0)
                                                      : std::numbers::pi / (2.0 * (m + 1.0));
    return v_j > 0.0 ? base : -base;
}

namespace {

struct PairData {
    double amp = 0.0;    // 2 |v_j v_k|^{-1/(m+1)}
    double freq = 0.0;   // 2 int_{t_k}^{t_j} V; the phase is freq / h
    double theta = 0.0;
};

struct DeltaData {
    double diag = 0.0;
    std::vector<PairData> pairs;
    std::vector<double> weights;  // |v_j|^{-1/(m+1)}
};

DeltaData delta_data(const PotentialModel& model, const CrossingCatalog& cat, ThetaConvention c) {
    if (cat.lambda_star.empty()) throw Error(ErrorCode::ConfigError, "no crossings");
    const int m = cat.m_star;
    const double e = 1.0 / (m + 1.0);
    DeltaData d;
    for (int j : cat.lambda_star) {
        const double w = std::pow(std::abs(cat.crossings[j].v), -e);
        d.diag += w * w;
        d.weights.push_back(w);
    }
    for (std::size_t a = 0; a < cat.lambda_star.size(); ++a) {
        for (std::size_t b = a + 1; b < cat.lambda_star.size(); ++b) {
            const Crossing& xj = cat.crossings[cat.lambda_star[a]];
            const Crossing& xk = cat.crossings[cat.lambda_star[b]];
            PairData p;
            p.amp = 2.0 * d.weights[a] * d.weights[b];
            p.freq = 2.0 * model.integral(xk.t, xj.t);
            p.theta = theta_jk(m, xj.v, xk.v, c);
            d.pairs.push_back(p);
        }
    }
    return d;
}

double delta_eval(const DeltaData& d, double h) {
    double s = d.diag;
    for (const PairData& p : d.pairs) s += p.amp * std::cos(p.freq / h + p.theta);
    return s;
}

}  // namespace

double delta_star(const PotentialModel& model, const CrossingCatalog& cat, double h, ThetaConvention c) {
    return delta_eval(delta_data(model, cat, c), h);
}

Theorem1Prediction theorem1_P(const PotentialModel& model, const CrossingCatalog& cat, double eps, double h,
                              const Theorem1Options& opt) {
    if (cat.size() == 0) throw Error(ErrorCode::ConfigError, "no crossings");
    Theorem1Prediction p;
    p.m_star = cat.m_star;
    if (p.m_star == 1 && !opt.allow_m1) {
        throw Error(ErrorCode::MStarTooSmall,
                    "m* = 1: the expansion needs the log-corrected parameter; use the Landau-Zener formula");
    }
    p.parity = cat.sigma_n() % 2;
    p.mu_star = mu_m(eps, h, p.m_star);
    if (opt.enforce_regime && p.mu_star > opt.mu_max) {
        throw Error(ErrorCode::RegimeViolation, "mu* = " + std::to_string(p.mu_star) + " above threshold");
    }
    p.gamma_star = gamma_star(p.m_star);
    p.delta_star = delta_star(model, cat, h, opt.theta);
    p.c_star = p.gamma_star * p.delta_star;
    const double lead = p.c_star * p.mu_star * p.mu_star;
    p.p_pred = p.parity == 1 ? 1.0 - lead : lead;
    p.error_order = "mu*^2 (mu* + h^(1/" + std::to_string(p.m_star * (p.m_star + 1)) + "))";
    return p;
}

std::vector<InterferenceZero> interference_zeros(const PotentialModel& model, const CrossingCatalog& cat,
                                                 double h_lo, double h_hi, ThetaConvention c) {
    if (!(h_lo > 0.0 && h_hi > h_lo)) throw Error(ErrorCode::ConfigError, "need 0 < h_lo < h_hi");
    const DeltaData d = delta_data(model, cat, c);
    std::vector<InterferenceZero> out;
    if (d.pairs.empty()) return out;
    if (d.pairs.size() == 1) {
        // delta = w1^2 + w2^2 + 2 w1 w2 cos(F/h + theta) vanishes only for equal weights.
        const double w1 = d.weights[0];
        const double w2 = d.weights[1];
        if (std::abs(w1 - w2) > 1e-9 * std::max(w1, w2)) return out;
        const PairData& p = d.pairs[0];
        if (p.freq == 0.0) return out;
        // F/h + theta = (2k+1) pi.
        const double x_lo = std::min(p.freq / h_hi, p.freq / h_lo);
        const double x_hi = std::max(p.freq / h_hi, p.freq / h_lo);
        const long k0 = static_cast<long>(std::ceil((x_lo + p.theta) / (2.0 * std::numbers::pi) - 0.5));
        const long k1 = static_cast<long>(std::floor((x_hi + p.theta) / (2.0 * std::numbers::pi) - 0.5));
        for (long k = k0; k <= k1; ++k) {
            const double x = (2.0 * k + 1.0) * std::numbers::pi - p.theta;
            const double h = p.freq / x;
            if (h < h_lo || h > h_hi) continue;
            out.push_back({h, delta_eval(d, h), true, static_cast<int>(k)});
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.h < b.h; });
        return out;
    }
    // Local minima in 1/h, refined by Brent's method.
    double fmax = 0.0;
    for (const PairData& p : d.pairs) fmax = std::max(fmax, std::abs(p.freq));
    const double y_lo = 1.0 / h_hi;
    const double y_hi = 1.0 / h_lo;
    const auto n = static_cast<std::size_t>(std::clamp(fmax * (y_hi - y_lo) / 0.05, 200.0, 5e6));
    const double dy = (y_hi - y_lo) / static_cast<double>(n);
    auto f = [&](double y) { return delta_eval(d, 1.0 / y); };
    double scale = 0.0;
    for (double w : d.weights) scale += w;
    scale *= scale;
    double prev = f(y_lo);
    double cur = f(y_lo + dy);
    for (std::size_t i = 2; i <= n; ++i) {
        const double next = f(y_lo + dy * static_cast<double>(i));
        if (cur < prev && cur <= next) {
            const double a = y_lo + dy * static_cast<double>(i - 2);
            const double b = y_lo + dy * static_cast<double>(i);
            const auto r = boost::math::tools::brent_find_minima(f, a, b, 52);
            InterferenceZero z;
            z.h = 1.0 / r.first;
            z.delta = r.second;
            z.exact = r.second < 1e-10 * scale;
            out.push_back(z);
        }
        prev = cur;
        cur = next;
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.h < b.h; });
    return out;
}

Theorem2Prediction theorem2_L(const PotentialModel& model, const CrossingCatalog& cat, double eps, double h,
                              const std::vector<Regime>& regime, const RegimeThresholds& thr) {
    const std::size_t n = cat.size();
    if (regime.size() != n) throw Error(ErrorCode::ConfigError, "one regime per crossing is required");
    Theorem2Prediction out;
    std::vector<int> flat;
    std::vector<int> sharp;
    for (std::size_t k = 0; k < n; ++k) {
        if (regime[k] == Regime::NonAdiabatic) {
            out.m_flat = std::max(out.m_flat, cat.crossings[k].m);
        } else {
            out.m_sharp = out.m_sharp == 0 ? cat.crossings[k].m : std::min(out.m_sharp, cat.crossings[k].m);
        }
    }
    if (out.m_flat > 0 && out.m_sharp > 0 && out.m_flat >= out.m_sharp) {
        throw Error(ErrorCode::RegimeViolation, "flat orders must lie below sharp orders");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (regime[k] == Regime::NonAdiabatic && cat.crossings[k].m == out.m_flat) flat.push_back(static_cast<int>(k));
        if (regime[k] == Regime::Adiabatic && cat.crossings[k].m == out.m_sharp) sharp.push_back(static_cast<int>(k));
    }
    const PredictedScattering ps = predicted_scattering(model, cat, eps, h, regime, thr);
    out.n_odd_adiabatic = ps.chain.n_odd_adiabatic;
    out.parity = ps.parity;

    // Leading data: flat factors keep the unnormalized beta = -i conj(omega) mu.
    std::vector<cplx> alpha = ps.alpha;
    std::vector<cplx> beta = ps.beta;
    for (std::size_t k = 0; k < n; ++k) {
        if (regime[k] != Regime::NonAdiabatic) continue;
        const Crossing& x = cat.crossings[k];
        cplx b = -kI * std::conj(omega_m(x.m, x.v)) * mu_m(eps, h, x.m);
        if (ps.chain.factors[2 * k].masked) b = -std::conj(b);
        alpha[k] = 1.0;
        beta[k] = b;
    }
    const Tau21 t = tau21_perturbative(alpha, beta, ps.nu);
    auto in = [](const std::vector<int>& s, int k) { return std::find(s.begin(), s.end(), k) != s.end(); };
    std::vector<int> members = flat;
    members.insert(members.end(), sharp.begin(), sharp.end());
    std::sort(members.begin(), members.end());
    for (int k : members) {
        const double d = std::norm(t.terms[k]);
        if (in(flat, k)) {
            out.flat_flat += d;
        } else {
            out.sharp_diag += d;
        }
    }
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            const int j = members[a];
            const int k = members[b];
            const cplx c = t.terms[j] * std::conj(t.terms[k]);
            const bool fj = in(flat, j);
            const bool fk = in(flat, k);
            std::string block = fj && fk ? "flat-flat" : (!fj && !fk ? "sharp-sharp" : "flat-sharp");
            const double v = 2.0 * c.real();
            if (block == "flat-flat") {
                out.flat_flat += v;
            } else if (block == "sharp-sharp") {
                out.sharp_sharp += v;
            } else {
                out.flat_sharp += v;
            }
            out.pairs.push_back({j + 1, k + 1, block, c});
        }
    }
    out.leading = out.flat_flat + out.sharp_diag + out.flat_sharp + out.sharp_sharp;
    out.p_pred = out.parity == 1 ? 1.0 - out.leading : out.leading;

    if (out.m_flat > 0) out.mu_flat = mu_m(eps, h, out.m_flat);
    if (out.m_sharp > 0) {
        out.mu_sharp = mu_m(eps, h, out.m_sharp);
        out.a = std::numeric_limits<double>::infinity();
        for (int k : sharp) out.a = std::min(out.a, turning_points(model, cat, k, eps).a);
    }
    const double ex = out.m_sharp > 0
                          ? std::exp(-out.a * std::pow(out.mu_sharp, (out.m_sharp + 1.0) / out.m_sharp))
                          : 0.0;
    out.eps1 = out.mu_flat + ex;
    out.eps2 = out.mu_flat * (out.mu_flat + (out.m_flat > 0 ? std::pow(h, 1.0 / (out.m_flat * (out.m_flat + 1.0)))
                                                             : 0.0));
    if (out.m_sharp > 0) out.eps2 += std::pow(out.mu_sharp, -(out.m_sharp + 1.0) / out.m_sharp) * ex;
    for (std::size_t k = 0; k < n; ++k) out.effective_sign.push_back(ps.chain.factors[2 * k + 1].masked ? -1 : 1);
    return out;
}

}  // namespace crosslab
