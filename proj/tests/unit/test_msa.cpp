#include "crosslab/error.hpp"
#include "crosslab/msa.hpp"
#include "crosslab/oscillatory.hpp"
#include "crosslab/transfer.hpp"

#include <doctest.h>

#include <cmath>

using namespace crosslab;

namespace {

const PotentialModel& cubic() {
    static const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 0.0}});
    return p;
}

}  // namespace

TEST_CASE("cumulative integral is exact for cubics") {
    const std::size_t n = 65;
    const double dt = 2.0 / (n - 1);
    std::vector<cplx> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = -1.0 + dt * i;
        g[i] = cplx(t * t * t - 2.0 * t, 0.5 * t * t);
    }
    const std::vector<cplx> c = cumulative_integral(g, dt, 16);
    const double a = -1.0 + dt * 16;
    const auto prim = [](double t) { return cplx(t * t * t * t / 4.0 - t * t, t * t * t / 6.0); };
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(c[i] - (prim(-1.0 + dt * i) - prim(a))) < 1e-13);
    }
}

TEST_CASE("K applied to u gives (i/h)(t - a) u") {
    const double h = 0.05;
    const MsaGrid g = make_msa_grid(cubic(), 0.0, -1.0, 1.0, h);
    CHECK((g.size() - 1 & (g.size() - 2)) == 0);
    for (int sign : {1, -1}) {
        std::vector<cplx> f(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = sign > 0 ? g.up[i] : std::conj(g.up[i]);
        const double a = g.t[g.index_of(-0.5)];
        const std::vector<cplx> k = apply_K(g, sign, a, f);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            err = std::max(err, std::abs(k[i] - cplx(0.0, 1.0 / h) * (g.t[i] - a) * f[i]));
        }
        CHECK(err < 1e-10);
    }
}

TEST_CASE("zero coupling gives the free solutions") {
    const MsaGrid g = make_msa_grid(cubic(), 0.0, -2.0, 2.0, 0.02);
    const MsaSolution w = msa_solution(g, 0.0, MsaWhich::W1, -2.0, -2.0, 3, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec2 v = w.value(i);
        err = std::max(err, std::abs(v.x - g.up[i]) + std::abs(v.y));
    }
    CHECK(err == 0.0);
    const CrossingCatalog cat = find_crossings(cubic(), -10.0, 10.0);
    const ConnectionResult r = connection_T_numeric(cubic(), cat, 0, 0.0, 0.02, -2.0, 2.0);
    CHECK(max_abs(r.t_msa - Mat2::identity()) < 1e-14);
}

TEST_CASE("symmetry of the two solutions") {
    const double h = 0.01;
    const double mu = 0.05;
    const double eps = mu * std::pow(h, 0.75);
    const MsaGrid g = make_msa_grid(cubic(), 0.0, -2.0, 2.0, h);
    for (double a : {-2.0, 0.7}) {
        const MsaSolution w1 = msa_solution(g, eps, MsaWhich::W1, a, a, 3, mu);
        const MsaSolution w2 = msa_solution(g, eps, MsaWhich::W2, a, a, 3, mu);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Vec2 p = w1.value(i);
            const Vec2 q = w2.value(i);
            err = std::max(err, std::abs(std::conj(q.y) - p.x) + std::abs(-std::conj(q.x) - p.y));
        }
        CHECK(err < 1e-10);
        CHECK(w1.residual < 1e-6);
        for (std::size_t k = 1; k < w1.term_sup.size(); ++k) CHECK(w1.term_sup[k] < w1.term_sup[k - 1]);
    }
}

TEST_CASE("same-side base point keeps the second component O(eps)") {
    const double h = 0.01;
    const double eps = 0.05 * std::pow(h, 0.75);
    const MsaGrid g = make_msa_grid(cubic(), 0.0, -2.0, 2.0, h);
    // a- = 2 and t in [1, 2]: no zero between a- and t.
    const MsaSolution w = msa_solution(g, eps, MsaWhich::W1, -2.0, 2.0, 3, 0.05);
    double second = 0.0;
    for (std::size_t i = g.index_of(1.0); i < g.size(); ++i) second = std::max(second, std::abs(w.value(i).y));
    CHECK(second < 5.0 * eps);
}

TEST_CASE("series that do not contract are rejected") {
    const double h = 0.01;
    const MsaGrid g = make_msa_grid(cubic(), 0.0, -2.0, 2.0, h);
    const double mu = 3.0;
    CHECK_THROWS_AS((void)msa_solution(g, mu * std::pow(h, 0.75), MsaWhich::W1, -2.0, -2.0, 4, mu), Error);
}

TEST_CASE("connection matrix off-diagonal approaches -i mu omega") {
    const CrossingCatalog cat = find_crossings(cubic(), -10.0, 10.0);
    PropagatorOptions po;
    po.stepper = Stepper::Magnus4;
    po.tol = 1e-12;
    const double mu = 0.05;
    std::vector<double> err;
    for (double h : {0.02, 0.005}) {
        const double eps = mu * std::pow(h, 0.75);
        const ConnectionResult r = connection_T_numeric(cubic(), cat, 0, eps, h, -2.0, 2.0, {}, po);
        CHECK(max_abs(r.t_msa - r.t_prop) < 1e-8);
        CHECK(unitarity_defect(r.t_msa) < 1e-6);
        CHECK(std::abs(r.t_msa.d - std::conj(r.t_msa.a)) < 1e-6);
        CHECK(std::abs(r.t_msa.c + std::conj(r.t_msa.b)) < 1e-6);
        err.push_back(std::abs(r.t_msa.b - cplx(0.0, -mu) * omega_m(3, 6.0)));
    }
    CHECK(err[1] < err[0]);
    CHECK(err[1] < 0.05 * mu);
}

TEST_CASE("operator norm scaling over an h-ladder") {
    std::vector<double> ratio;
    for (double h : {0.04, 0.02, 0.01, 0.005}) {
        const MsaGrid g = make_msa_grid(cubic(), 0.0, -2.0, 2.0, h);
        std::vector<cplx> f(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = 1.0 / (1.0 + g.t[i] * g.t[i]);
        const std::vector<cplx> k = k_cross_amplitude(g, -1, -2.0, f);
        ratio.push_back(q_norm(g, k, 0.25) / q_norm(g, f, 0.25) * std::pow(h, 0.75));
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    CHECK(*hi / *lo < 2.0);
}

TEST_CASE("default interval is symmetric about the crossing") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 2.0}, {3, 1.0, -2.0}});
    const CrossingCatalog cat = find_crossings(p, -10.0, 10.0);
    const auto [l, r] = msa_interval(p, cat, 0);
    CHECK(r - cat.crossings[0].t == doctest::Approx(cat.crossings[0].t - l));
    CHECK(l == doctest::Approx(0.0));
}
