#include "crosslab/error.hpp"
#include "crosslab/harness.hpp"
#include "crosslab/msa.hpp"
#include "crosslab/oscillatory.hpp"
#include "crosslab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace crosslab {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

cplx random_cplx(Rng& rng) { return {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)}; }

SU2 random_su2(Rng& rng) { return SU2{random_cplx(rng), random_cplx(rng)}.normalized(); }

PotentialModel random_tanh_model(Rng& rng) {
    std::vector<TanhFactor> fs;
    const int n = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < n; ++i) {
        fs.push_back({1 + static_cast<int>(rng() % 3), uniform(rng, 0.5, 2.0), uniform(rng, -2.0, 2.0)});
    }
    return PotentialModel::scaled_tanh_product(uniform(rng, 0.5, 2.0), fs);
}

// Scaling and squaring with a 20-term Taylor sum.
Mat2 expm_taylor(const Mat2& m) {
    int s = 0;
    double nrm = max_abs(m);
    while (nrm > 0.1) {
        nrm /= 2.0;
        ++s;
    }
    const Mat2 a = std::ldexp(1.0, -s) * m;
    Mat2 term = Mat2::identity();
    Mat2 sum = Mat2::identity();
    for (int k = 1; k <= 20; ++k) {
        term = (1.0 / k) * (term * a);
        sum = sum + term;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

class Suite {
public:
    Suite(std::vector<CheckResult>& out, std::string name) : out_(out), name_(std::move(name)) {}

    // value <= threshold passes.
    void at_most(const std::string& check, double value, double threshold) {
        out_.push_back({name_, check, value <= threshold, value, threshold});
    }
    void at_least(const std::string& check, double value, double threshold) {
        out_.push_back({name_, check, value >= threshold, value, threshold});
    }
    void fail(const std::string& check, const std::exception& e) {
        out_.push_back({name_, check + " [" + e.what() + "]", false, std::nan(""), 0.0});
    }

private:
    std::vector<CheckResult>& out_;
    std::string name_;
};

void propagator_suite(Rng& rng, std::vector<CheckResult>& out) {
    Suite s(out, "propagator");
    double unit = 0.0;
    double comp = 0.0;
    double steppers = 0.0;
    double reversal = 0.0;
    PropagatorOptions rk;
    rk.tol = 1e-11;
    PropagatorOptions mg = rk;
    mg.stepper = Stepper::Magnus4;
    for (int trial = 0; trial < 6; ++trial) {
        const PotentialModel model = random_tanh_model(rng);
        const double eps = uniform(rng, 0.05, 0.5);
        const double h = uniform(rng, 0.05, 0.5);
        const double a = uniform(rng, -4.0, -1.0);
        const double b = uniform(rng, 1.0, 4.0);
        const double mid = uniform(rng, a, b);
        const Mat2 m = fundamental_matrix(model, eps, h, a, b, rk);
        unit = std::max(unit, unitarity_defect(m));
        const Mat2 split = fundamental_matrix(model, eps, h, mid, b, rk) * fundamental_matrix(model, eps, h, a, mid, rk);
        comp = std::max(comp, max_abs(m - split));
        steppers = std::max(steppers, max_abs(m - fundamental_matrix(model, eps, h, a, b, mg)));
        const Vec2 psi0{random_cplx(rng), random_cplx(rng)};
        const Vec2 phi0{-std::conj(psi0.y), std::conj(psi0.x)};
        const Vec2 psi = propagate(model, eps, h, a, b, psi0, rk);
        const Vec2 phi = propagate(model, eps, h, a, b, phi0, rk);
        reversal = std::max(reversal, std::abs(phi.x + std::conj(psi.y)) + std::abs(phi.y - std::conj(psi.x)));
    }
    s.at_most("unitarity defect", unit, 1e-8);
    s.at_most("composition M(b,a) = M(b,c) M(c,a)", comp, 1e-8);
    s.at_most("RKF78 vs Magnus4", steppers, 1e-6);
    s.at_most("time-reversal pairing", reversal, 1e-8);
}

void msa_suite(Rng& rng, std::vector<CheckResult>& out) {
    Suite s(out, "msa");
    const PotentialModel t3 = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 0.0}});
    const CrossingCatalog cat = find_crossings(t3, -10.0, 10.0);
    try {
        double sym = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const double h = trial == 0 ? 0.02 : 0.01;
            const double mu = uniform(rng, 0.02, 0.08);
            const double eps = mu * std::pow(h, 0.75);
            const double a = uniform(rng, -2.0, 2.0);
            const MsaGrid g = make_msa_grid(t3, 0.0, -2.0, 2.0, h);
            const MsaSolution w1 = msa_solution(g, eps, MsaWhich::W1, a, a, 3, mu);
            const MsaSolution w2 = msa_solution(g, eps, MsaWhich::W2, a, a, 3, mu);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const Vec2 p = w1.value(i);
                const Vec2 q = w2.value(i);
                // [[0, 1], [-1, 0]] conj(w2) = w1.
                sym = std::max(sym, std::abs(std::conj(q.y) - p.x) + std::abs(-std::conj(q.x) - p.y));
            }
        }
        s.at_most("symmetry [[0,1],[-1,0]] conj(w2) = w1", sym, 1e-10);
    } catch (const std::exception& e) {
        s.fail("symmetry", e);
    }
    try {
        // ||(i/h) int e^{2i Phi/h} f||_q / ||f||_q h^{3/4} over an h-ladder, q = 1/4.
        std::vector<double> ratio;
        for (double h : {0.04, 0.02, 0.01, 0.005}) {
            const MsaGrid g = make_msa_grid(t3, 0.0, -2.0, 2.0, h);
            std::vector<cplx> f(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-g.t[i] * g.t[i]) * (1.0 + 0.5 * g.t[i]);
            const std::vector<cplx> kf = k_cross_amplitude(g, 1, -2.0, f);
            ratio.push_back(q_norm(g, kf, 0.25) / q_norm(g, f, 0.25) * std::pow(h, 0.75));
        }
        const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
        s.at_most("operator norm h^{m/(m+1)} ratio spread", *hi / *lo, 2.0);
    } catch (const std::exception& e) {
        s.fail("operator norm scaling", e);
    }
    try {
        const double h = 0.01;
        const double eps = 0.05 * std::pow(h, 0.75);
        PropagatorOptions po;
        po.stepper = Stepper::Magnus4;
        po.tol = 1e-12;
        const ConnectionResult r = connection_T_numeric(t3, cat, 0, eps, h, -2.0, 2.0, {}, po);
        s.at_most("connection T (series) vs propagator", max_abs(r.t_msa - r.t_prop),
                  std::max(1e-8, r.series_bound + r.grid_error));
        s.at_most("connection T unitarity", unitarity_defect(r.t_msa), 1e-6);
    } catch (const std::exception& e) {
        s.fail("connection T", e);
    }
}

void stationary_phase_suite(Rng& rng, std::vector<CheckResult>& out) {
    Suite s(out, "stationary_phase");
    const double inf = std::numeric_limits<double>::infinity();
    OscOptions cut;
    cut.tail_cut = 7.0;
    try {
        // V = t: int exp(-t^2) exp(i t^2/h) dt = sqrt(pi / (1 - i/h)).
        const PotentialModel lz = PotentialModel::linear_lz(1.0);
        double err = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const double h = uniform(rng, 0.01, 0.2);
            const auto f = [](double t) { return cplx(std::exp(-t * t)); };
            const cplx num = osc_integral(lz, -inf, inf, 0.0, h, f, 1, 1, cut).value;
            const cplx exact = std::sqrt(std::numbers::pi / cplx(1.0, -1.0 / h));
            err = std::max(err, std::abs(num - exact));
        }
        s.at_most("Fresnel closed form", err, 1e-8);
    } catch (const std::exception& e) {
        s.fail("Fresnel closed form", e);
    }
    try {
        const PotentialModel t2 = PotentialModel::scaled_tanh_product(1.0, {{2, 1.0, 0.0}});
        const double h = uniform(rng, 0.02, 0.1);
        const auto f = [](double t) { return cplx(std::exp(-t * t)); };
        const cplx p = osc_integral(t2, -3.0, 3.0, 0.0, h, f, 1, 2).value;
        const cplx m = osc_integral(t2, -3.0, 3.0, 0.0, h, f, -1, 2).value;
        s.at_most("sign flip conjugates for real f", std::abs(m - std::conj(p)), 1e-10);
    } catch (const std::exception& e) {
        s.fail("conjugation symmetry", e);
    }
    try {
        // V = 2 + t on [-1, 1]: no stationary point, so |I| / h stays bounded.
        const PotentialModel shifted = PotentialModel::polynomial_windowed({2.0, 1.0}, 1.5, 0.25);
        std::vector<double> r;
        for (double h : {0.04, 0.02, 0.01, 0.005, 0.0025}) {
            const auto f = [](double t) { return cplx(1.0 + t * t); };
            r.push_back(std::abs(osc_integral(shifted, -1.0, 1.0, 0.0, h, f, 1, 1).value) / h);
        }
        s.at_most("non-stationary |I|/h bound", *std::max_element(r.begin(), r.end()), 10.0);
    } catch (const std::exception& e) {
        s.fail("non-stationary decay", e);
    }
    try {
        // Remainder slope for m = 3 on a dyadic ladder.
        const PotentialModel t3 = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 0.0}});
        const double v = t3.derivative(0.0, 3);
        std::vector<double> hs;
        std::vector<double> rem;
        for (int j = 0; j < 6; ++j) {
            const double h = 0.02 * std::ldexp(1.0, -j);
            const auto f = [](double t) { return cplx(std::exp(-t * t)); };
            const cplx num = osc_integral(t3, -inf, inf, 0.0, h, f, 1, 3, cut).value;
            hs.push_back(h);
            rem.push_back(std::abs(num - stationary_phase_leading(1.0, 3, v, h)));
        }
        s.at_least("m = 3 remainder slope", fit_loglog(hs, rem).slope, 0.5 - 0.1);
    } catch (const std::exception& e) {
        s.fail("remainder slope", e);
    }
}

void su2_suite(Rng& rng, std::vector<CheckResult>& out) {
    Suite s(out, "su2");
    double unit = 0.0;
    double tau = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        std::vector<SU2> fs;
        Mat2 direct = Mat2::identity();
        for (std::size_t k = 0; k < n; ++k) {
            fs.push_back(random_su2(rng));
            direct = direct * fs.back().matrix();
        }
        const Mat2 p = su2_chain_product(fs).matrix();
        unit = std::max(unit, std::max(unitarity_defect(p), max_abs(p - direct)));
        tau = std::max(tau, std::abs(p.b + std::conj(p.c)) + std::abs(p.d - std::conj(p.a)));
    }
    s.at_most("chain product unitarity", unit, 1e-12);
    s.at_most("tau12 = -conj(tau21), tau22 = conj(tau11)", tau, 1e-12);
    double qerr = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Mat2 m{random_cplx(rng), random_cplx(rng), random_cplx(rng), random_cplx(rng)};
        const Mat2 swapped{m.d, m.c, m.b, m.a};
        qerr = std::max(qerr, max_abs(kQ * m - swapped * kQ));
        qerr = std::max(qerr, max_abs(kQ * kQ - Mat2::identity()));
        const SU2 u = random_su2(rng);
        qerr = std::max(qerr, max_abs(kQ * u.matrix() * kQ - u.q_conjugate().matrix()));
    }
    s.at_most("Q M = swap(M) Q, Q^2 = I", qerr, 1e-14);
    double pair = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        std::vector<cplx> alpha(n, 1.0);
        std::vector<cplx> beta(n);
        std::vector<cplx> nu(n);
        for (std::size_t k = 0; k < n; ++k) {
            beta[k] = 1e-2 * random_cplx(rng);
            nu[k] = std::polar(1.0, uniform(rng, 0.0, 2.0 * std::numbers::pi));
        }
        const Tau21 t = tau21_perturbative(alpha, beta, nu);
        pair = std::max(pair, std::abs(t.modulus_sq - std::norm(t.tau21)));
    }
    s.at_most("pairwise |tau21|^2 with alpha = 1", pair, 1e-12);
}

void jost_suite(Rng& rng, std::vector<CheckResult>& out) {
    Suite s(out, "jost");
    const PotentialModel pair = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 2.0}, {3, 1.0, -2.0}});
    const CrossingCatalog cat = find_crossings(pair, -10.0, 10.0);
    PropagatorOptions po;
    po.tol = 1e-12;
    try {
        double trunc = 0.0;
        double anchor = 0.0;
        for (int trial = 0; trial < 2; ++trial) {
            const double eps = uniform(rng, 0.02, 0.2);
            const double h = uniform(rng, 0.05, 0.2);
            ScatteringOptions so;
            so.prop = po;
            const ScatteringReport base = scattering_matrix(pair, eps, h, so);
            ScatteringOptions far = so;
            far.t_right = 2.0 * base.t_right;
            far.t_left = 2.0 * base.t_left;
            trunc = std::max(trunc, std::abs(scattering_matrix(pair, eps, h, far).p - base.p));
            ScatteringOptions near = so;
            near.t_right = pair.tail_anchor(Side::Right, 1e-8);
            near.t_left = pair.tail_anchor(Side::Left, 1e-8);
            anchor = std::max(anchor, std::abs(scattering_matrix(pair, eps, h, near).p - base.p));
        }
        s.at_most("P under doubled truncation", trunc, 1e-7);
        s.at_most("P under moved anchors", anchor, 1e-7);
    } catch (const std::exception& e) {
        s.fail("truncation and anchors", e);
    }
    try {
        double err = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const double a = uniform(rng, -1.0, 1.0);
            const cplx b = 1e-2 * random_cplx(rng);
            const double h = uniform(rng, 0.05, 1.0);
            const Mat2 k{a, b, std::conj(b), -a};
            err = std::max(err, max_abs(expm_hermitian_phase(a, b, h) - expm_taylor(cplx(0.0, -1.0 / h) * k)));
        }
        s.at_most("closed-form exponential vs Taylor oracle", err, 1e-12);
    } catch (const std::exception& e) {
        s.fail("closed-form exponential", e);
    }
    try {
        // Jost basis in the u_r gauge: off-diagonal O(eps), diagonal correction O(eps^2/h).
        const double h = 0.1;
        const double anchor = default_anchor(pair, cat, Side::Right);
        const double t = cat.crossings.front().t;
        std::vector<double> eps{0.005, 0.01, 0.02, 0.04, 0.08};
        std::vector<double> off;
        std::vector<double> diag;
        for (double e : eps) {
            const Mat2 g = jost_gauge_matrix(pair, cat, e, h, t, anchor, po);
            off.push_back(std::max(std::abs(g.b), std::abs(g.c)));
            diag.push_back(std::max(std::abs(g.a - 1.0), std::abs(g.d - 1.0)));
        }
        s.at_least("gauge off-diagonal slope in eps", fit_loglog(eps, off).slope, 0.9);
        s.at_least("gauge diagonal slope in eps", fit_loglog(eps, diag).slope, 1.8);
    } catch (const std::exception& e) {
        s.fail("gauge structure", e);
    }
}

}  // namespace

std::vector<CheckResult> run_verify(std::uint64_t seed, const std::string& only) {
    std::vector<CheckResult> out;
    const auto want = [&](const char* name) { return only.empty() || only == name; };
    if (want("propagator")) {
        Rng rng(seed);
        propagator_suite(rng, out);
    }
    if (want("msa")) {
        Rng rng(seed + 1);
        msa_suite(rng, out);
    }
    if (want("stationary_phase")) {
        Rng rng(seed + 2);
        stationary_phase_suite(rng, out);
    }
    if (want("su2")) {
        Rng rng(seed + 3);
        su2_suite(rng, out);
    }
    if (want("jost")) {
        Rng rng(seed + 4);
        jost_suite(rng, out);
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, "unknown suite '" + only + "'");
    return out;
}

}  // namespace crosslab
