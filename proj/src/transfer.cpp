#include "crosslab/transfer.hpp"
#include "crosslab/error.hpp"
#include "crosslab/oscillatory.hpp"
#include "crosslab/scattering.hpp"

#include <cmath>

namespace crosslab {

SU2 SU2::normalized() const {
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return {a / n, b / n};
}

SU2 operator*(const SU2& l, const SU2& r) {
    // First column of [[la, -conj(lb)], [lb, conj(la)]] [[ra, .], [rb, .]].
    return {l.a * r.a - std::conj(l.b) * r.b, l.b * r.a + std::conj(l.a) * r.b};
}

double mu_m(double eps, double h, int m) { return eps * std::pow(h, -static_cast<double>(m) / (m + 1.0)); }

double mu_tilde_1(double eps, double h) { return std::sqrt(std::log(1.0 / h)) * eps / std::sqrt(h); }

std::string to_string(BandMode m) { return m == BandMode::Mu ? "mu" : "probability"; }

BandMode band_mode_from_string(const std::string& s) {
    if (s == "mu") return BandMode::Mu;
    if (s == "probability") return BandMode::Probability;
    throw Error(ErrorCode::ConfigError, "unknown band mode '" + s + "'");
}

std::optional<Regime> classify_crossing(const Crossing& x, double eps, double h, const RegimeThresholds& thr) {
    const double mu = mu_m(eps, h, x.m);
    if (thr.mode == BandMode::Probability) {
        const double flat = std::norm(omega_m(x.m, x.v)) * mu * mu;
        const double e = 2.0 * local_decay_constant(x.m, x.v) * std::pow(mu, (x.m + 1.0) / x.m);
        if (flat <= thr.prob_max) return Regime::NonAdiabatic;
        if (4.0 * std::exp(-e) <= thr.prob_max) return Regime::Adiabatic;
        return std::nullopt;
    }
    const double small = x.m == 1 && h < 1.0 ? mu_tilde_1(eps, h) : mu;
    if (small <= thr.flat_max) return Regime::NonAdiabatic;
    if (mu >= thr.sharp_min) return Regime::Adiabatic;
    return std::nullopt;
}

namespace {

void check_index(const CrossingCatalog& cat, std::size_t k) {
    if (k >= cat.size()) throw Error(ErrorCode::ConfigError, "crossing index out of range");
}

std::string mu_text(int m) { return "mu_" + std::to_string(m); }

}  // namespace

TransferFactor t_k_nonadiabatic(const CrossingCatalog& cat, std::size_t k, double eps, double h,
                                const RegimeThresholds& thr) {
    check_index(cat, k);
    const Crossing& x = cat.crossings[k];
    if (thr.enforce && classify_crossing(x, eps, h, thr) != Regime::NonAdiabatic) {
        throw Error(ErrorCode::RegimeViolation,
                    "crossing " + std::to_string(k + 1) + " is not non-adiabatic (mu = " +
                        std::to_string(mu_m(eps, h, x.m)) + ")");
    }
    const double mu = mu_m(eps, h, x.m);
    const cplx w = omega_m(x.m, x.v);
    TransferFactor f;
    f.m = SU2{1.0, -kI * std::conj(w) * mu}.normalized();
    f.error_order = mu_text(x.m) + "^2 + " + mu_text(x.m) + " h^(1/" + std::to_string(x.m + 1) + ")";
    return f;
}

TransferFactor t_between(const PotentialModel& model, const CrossingCatalog& cat, std::size_t k, double h) {
    if (k + 1 >= cat.size()) throw Error(ErrorCode::ConfigError, "t_between needs crossings k and k+1");
    const double phase = model.integral(cat.crossings[k + 1].t, cat.crossings[k].t) / h;
    TransferFactor f;
    f.m = SU2{std::polar(1.0, -phase), 0.0};
    f.error_order = "eps^2/h";
    return f;
}

Mat2 AdiabaticFactor::full() const {
    const Mat2 p = prime.matrix();
    return iq ? kI * (kQ * p) : p;
}

AdiabaticFactor t_k_adiabatic(const PotentialModel& model, const CrossingCatalog& cat, std::size_t k,
                              double eps, double h, const RegimeThresholds& thr) {
    check_index(cat, k);
    const Crossing& x = cat.crossings[k];
    if (thr.enforce && classify_crossing(x, eps, h, thr) != Regime::Adiabatic) {
        throw Error(ErrorCode::RegimeViolation,
                    "crossing " + std::to_string(k + 1) + " is not adiabatic (mu = " +
                        std::to_string(mu_m(eps, h, x.m)) + ")");
    }
    const TurningPointPair tp = turning_points(model, cat, k, eps);
    const cplx a1 = tp.action_1;
    const cplx am = tp.action_m;
    const cplx c1 = std::conj(a1);
    const cplx cm = std::conj(am);
    const double sm = x.m % 2 == 0 ? 1.0 : -1.0;
    const double sk = cat.sigma[k] % 2 == 0 ? 1.0 : -1.0;
    auto ex = [h](cplx z) { return std::exp(-kI / (2.0 * h) * z); };
    AdiabaticFactor f;
    f.a_k = tp.a;
    if (x.m == 1) {
        // Both turning points coincide; a single exponential carries the transition.
        f.beta = sk * ex(c1 - a1);
        f.beta_envelope = std::abs(f.beta);
        f.alpha = std::sqrt(std::max(0.0, 1.0 - std::norm(f.beta)));
    } else {
        f.alpha = ex(c1 - cm) + sm * ex(c1 - 2.0 * a1 + cm);
        f.beta = sk * (ex(c1 - am) - sm * ex(c1 - 2.0 * a1 + am));
        f.beta_envelope = std::abs(ex(c1 - am));
    }
    f.w = SU2{f.alpha, f.beta}.normalized();
    const bool odd_before = cat.sigma_before(k) % 2 != 0;
    const SU2 cw = odd_before ? f.w.conj() : f.w;
    if (x.m % 2 == 0) {
        f.prime = cw;
    } else {
        // diag(-i, i) for even sigma_{k-1}, diag(i, -i) for odd.
        const cplx d = odd_before ? kI : -kI;
        f.prime = SU2{d * cw.a, d * cw.b};
        f.iq = true;
    }
    f.error_order = mu_text(x.m) + "^(-" + std::to_string(x.m + 1) + "/" + std::to_string(x.m) + ")";
    return f;
}

SU2 su2_chain_product(const std::vector<SU2>& factors) {
    SU2 p;
    for (const SU2& f : factors) p = p * f;
    return p;
}

Tau21 tau21_perturbative(const std::vector<cplx>& alpha, const std::vector<cplx>& beta,
                         const std::vector<cplx>& nu) {
    const std::size_t n = alpha.size();
    if (beta.size() != n || nu.size() != n) throw Error(ErrorCode::ConfigError, "chain data sizes differ");
    Tau21 r;
    r.terms.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx t = beta[j];
        for (std::size_t q = 0; q < j; ++q) t *= std::conj(alpha[q]) * std::conj(nu[q]);
        for (std::size_t q = j + 1; q < n; ++q) t *= alpha[q];
        for (std::size_t q = j; q < n; ++q) t *= nu[q];
        r.terms[j] = t;
        r.tau21 += t;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::norm(beta[j]);
    cplx cross = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            cplx t = beta[j] * alpha[j] * alpha[k] * std::conj(beta[k]);
            for (std::size_t q = j + 1; q < k; ++q) t *= alpha[q] * alpha[q];
            for (std::size_t q = j; q < k; ++q) t *= nu[q] * nu[q];
            cross += t;
        }
    }
    r.modulus_sq = s + 2.0 * cross.real();
    return r;
}

PredictedScattering predicted_scattering(const PotentialModel& model, const CrossingCatalog& cat, double eps,
                                         double h, const std::vector<Regime>& regime,
                                         const RegimeThresholds& thr) {
    const std::size_t n = cat.size();
    if (regime.size() != n) throw Error(ErrorCode::ConfigError, "one regime per crossing is required");
    PredictedScattering out;
    TransferChain& chain = out.chain;
    chain.regime = regime;

    // Connectors.
    Mat2 tr_inv = Mat2::identity();
    cplx nu_last = 1.0;
    bool v_left_negative = model.v_left() < 0.0;
    if (model.has_finite_tails()) {
        const double ar = default_anchor(model, cat, Side::Right);
        const double al = default_anchor(model, cat, Side::Left);
        tr_inv = connector_T_r(model, cat, h, ar).m.adjoint();
        const double rl = regularized_action(model, cat, Side::Left, al, true).value;
        nu_last = std::polar(1.0, -rl / h);
    } else {
        v_left_negative = cat.sigma_n() % 2 != 0;
    }
    chain.apply_j = v_left_negative;

    // Odd adiabatic crossings, increasing index.
    std::vector<std::size_t> odd_sharp;
    for (std::size_t k = 0; k < n; ++k) {
        if (regime[k] == Regime::Adiabatic && cat.crossings[k].m % 2 != 0) odd_sharp.push_back(k);
    }
    chain.n_odd_adiabatic = static_cast<int>(odd_sharp.size());
    auto masked = [&](std::size_t j) {
        for (std::size_t l = 0; l < odd_sharp.size(); l += 2) {
            const std::size_t lo = odd_sharp[l];
            const std::size_t hi = l + 1 < odd_sharp.size() ? odd_sharp[l + 1] : n;
            if (j >= lo && j < hi) return true;
        }
        return false;
    };

    Mat2 direct = Mat2::identity();
    SU2 masked_product;
    for (std::size_t k = 0; k < n; ++k) {
        ChainFactor cf;
        cf.label = "T_" + std::to_string(k + 1);
        Mat2 full;
        if (regime[k] == Regime::NonAdiabatic) {
            const TransferFactor f = t_k_nonadiabatic(cat, k, eps, h, thr);
            cf.m = f.m;
            cf.error_order = f.error_order;
            full = f.m.matrix();
        } else {
            const AdiabaticFactor f = t_k_adiabatic(model, cat, k, eps, h, thr);
            cf.m = f.prime;
            cf.iq = f.iq;
            cf.error_order = f.error_order;
            full = f.full();
        }
        cf.masked = masked(k);
        direct = direct * full;
        const SU2 mk = cf.masked ? cf.m.q_conjugate() : cf.m;
        masked_product = masked_product * mk;
        out.alpha.push_back(mk.a);
        out.beta.push_back(mk.b);
        chain.factors.push_back(cf);

        ChainFactor bf;
        bf.label = "T_" + std::to_string(k + 1) + "," + std::to_string(k + 2);
        if (k + 1 < n) {
            const TransferFactor f = t_between(model, cat, k, h);
            bf.m = f.m;
            bf.error_order = f.error_order;
        } else {
            bf.m = SU2{nu_last, 0.0};
            bf.error_order = "eps^2/h";
        }
        bf.masked = masked(k);
        direct = direct * bf.m.matrix();
        const SU2 mb = bf.masked ? bf.m.q_conjugate() : bf.m;
        masked_product = masked_product * mb;
        out.nu.push_back(mb.a);
        chain.factors.push_back(bf);
    }
    if (chain.apply_j) direct = direct * kJ;
    out.s = tr_inv * direct;

    Mat2 tail = Mat2::identity();
    for (int i = 0; i < chain.n_odd_adiabatic; ++i) tail = tail * (kI * kQ);
    if (chain.apply_j) tail = tail * kJ;
    out.s_masked = tr_inv * masked_product.matrix() * tail;
    out.path_gap = max_abs(out.s - out.s_masked);
    out.p = std::norm(out.s.c);
    out.parity = (cat.sigma_n() + chain.n_odd_adiabatic) % 2;
    return out;
}

}  // namespace crosslab
