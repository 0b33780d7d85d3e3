#include "crosslab/error.hpp"
#include "crosslab/oscillatory.hpp"
#include "crosslab/predictor.hpp"
#include "crosslab/transfer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace crosslab;

namespace {

const PotentialModel& pair3() {
    static const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 2.0}, {3, 1.0, -2.0}});
    return p;
}

}  // namespace

TEST_CASE("gamma closed forms") {
    CHECK(gamma_star(1) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
    const double g43 = std::tgamma(4.0 / 3.0);
    CHECK(gamma_star(2) == doctest::Approx(4.0 * std::cbrt(9.0) * g43 * g43 * 0.75).epsilon(1e-13));
    const double g54 = std::tgamma(5.0 / 4.0);
    CHECK(gamma_star(3) == doctest::Approx(4.0 * std::sqrt(12.0) * g54 * g54).epsilon(1e-13));
    // |omega_m(v)|^2 = gamma_m |v|^{-2/(m+1)}.
    for (int m = 1; m <= 6; ++m) {
        for (double v : {0.5, -3.0}) {
            CHECK(std::norm(omega_m(m, v)) == doctest::Approx(gamma_star(m) * std::pow(std::abs(v), -2.0 / (m + 1))).epsilon(1e-10));
        }
    }
}

TEST_CASE("phase offsets") {
    CHECK(theta_jk(3, 1.0, -2.0) == doctest::Approx(std::numbers::pi / 4.0));
    CHECK(theta_jk(3, -1.0, 2.0) == doctest::Approx(-std::numbers::pi / 4.0));
    CHECK(theta_jk(3, 1.0, -2.0, ThetaConvention::ProofDisplay) == doctest::Approx(std::numbers::pi / 8.0));
    CHECK(theta_jk(3, 1.0, 2.0) == 0.0);
    CHECK(theta_jk(2, 1.0, -2.0) == 0.0);
    CHECK(theta_from_string(to_string(ThetaConvention::ProofDisplay)) == ThetaConvention::ProofDisplay);
    CHECK_THROWS_AS((void)theta_from_string("half"), Error);
}

TEST_CASE("delta for a single crossing") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(2.0, {{3, 1.5, 0.0}});
    const CrossingCatalog cat = find_crossings(p, -10.0, 10.0);
    const double v = cat.crossings[0].v;
    for (double h : {0.1, 0.01, 0.001}) CHECK(delta_star(p, cat, h) == doctest::Approx(std::pow(std::abs(v), -0.5)));
}

TEST_CASE("delta for two crossings is a cos^2 law with the stated offset") {
    const CrossingCatalog cat = find_crossings(pair3(), -10.0, 10.0);
    REQUIRE(cat.size() == 2);
    const double area = area_between(cat, pair3(), 0, 1);
    const double v = std::abs(cat.crossings[0].v);
    for (double h : {0.013, 0.0071, 0.0042}) {
        const double c = std::cos(area / (2.0 * h) - std::numbers::pi / 8.0);
        CHECK(delta_star(pair3(), cat, h) == doctest::Approx(4.0 / std::sqrt(v) * c * c).epsilon(1e-9));
    }
}

TEST_CASE("interference zeros follow the closed-form ladder") {
    const CrossingCatalog cat = find_crossings(pair3(), -10.0, 10.0);
    const double area = area_between(cat, pair3(), 0, 1);
    const std::vector<InterferenceZero> z = interference_zeros(pair3(), cat, 0.004, 0.02);
    REQUIRE(z.size() >= 3);
    for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(z[i].exact);
        CHECK(std::abs(z[i].delta) < 1e-9);
        if (i > 0) {
            CHECK(z[i].h > z[i - 1].h);
            // Consecutive zeros are one period apart in 1/h.
            CHECK(1.0 / z[i - 1].h - 1.0 / z[i].h == doctest::Approx(2.0 * std::numbers::pi / area).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS((void)interference_zeros(pair3(), cat, 0.02, 0.01), Error);
}

TEST_CASE("unequal weights have minima but no zeros") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 2.0}, {3, 2.0, -2.0}});
    const CrossingCatalog cat = find_crossings(p, -10.0, 10.0);
    CHECK(interference_zeros(p, cat, 0.004, 0.02).empty());
    const PotentialModel q = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 3.0}, {3, 2.0, 0.0}, {3, 1.0, -3.0}});
    const CrossingCatalog cq = find_crossings(q, -10.0, 10.0);
    const std::vector<InterferenceZero> z = interference_zeros(q, cq, 0.004, 0.02);
    CHECK_FALSE(z.empty());
    for (const auto& x : z) CHECK(delta_star(q, cq, x.h) <= delta_star(q, cq, x.h * 1.001) + 1e-12);
}

TEST_CASE("delta oscillation frequency matches twice the enclosed area") {
    const CrossingCatalog cat = find_crossings(pair3(), -10.0, 10.0);
    const double area = area_between(cat, pair3(), 0, 1);
    // Sample delta uniformly in y = 1/h and locate the DFT peak.
    const std::size_t n = 4096;
    const double y0 = 100.0;
    const double y1 = 400.0;
    std::vector<double> s(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = delta_star(pair3(), cat, 1.0 / (y0 + (y1 - y0) * i / n));
        mean += s[i] / n;
    }
    double best = 0.0;
    double best_f = 0.0;
    for (double f = 0.5 * area; f < 1.5 * area; f += 1e-3 * area) {
        cplx acc;
        for (std::size_t i = 0; i < n; ++i) acc += (s[i] - mean) * std::polar(1.0, -f * (y0 + (y1 - y0) * i / n));
        if (std::abs(acc) > best) {
            best = std::abs(acc);
            best_f = f;
        }
    }
    CHECK(best_f == doctest::Approx(area).epsilon(5e-3));
}

TEST_CASE("theorem 1 against the first-order chain") {
    const CrossingCatalog cat = find_crossings(pair3(), -10.0, 10.0);
    const double h = 0.005;
    const double mu = 1e-3;
    const double eps = mu * std::pow(h, 0.75);
    const Theorem1Prediction t = theorem1_P(pair3(), cat, eps, h);
    CHECK(t.m_star == 3);
    CHECK(t.parity == cat.sigma_n() % 2);
    CHECK(t.mu_star == doctest::Approx(mu));
    std::vector<cplx> alpha;
    std::vector<cplx> beta;
    std::vector<cplx> nu;
    for (std::size_t k = 0; k < cat.size(); ++k) {
        alpha.push_back(1.0);
        beta.push_back(cplx(0.0, -1.0) * std::conj(omega_m(3, cat.crossings[k].v)) * mu);
        nu.push_back(k + 1 < cat.size() ? t_between(pair3(), cat, k, h).m.a : cplx(1.0));
    }
    const double lead = std::norm(tau21_perturbative(alpha, beta, nu).tau21);
    CHECK(t.c_star * mu * mu == doctest::Approx(lead).epsilon(1e-12));
    const PredictedScattering s =
        predicted_scattering(pair3(), cat, eps, h, {Regime::NonAdiabatic, Regime::NonAdiabatic});
    CHECK(s.p == doctest::Approx(t.p_pred).epsilon(1e-5));
}

TEST_CASE("theorem 1 refusals") {
    const PotentialModel lz = PotentialModel::linear_lz(2.0);
    const CrossingCatalog cat = find_crossings(lz, -10.0, 10.0);
    CHECK_THROWS_AS((void)theorem1_P(lz, cat, 0.01, 0.01), Error);
    const CrossingCatalog c3 = find_crossings(pair3(), -10.0, 10.0);
    CHECK_THROWS_AS((void)theorem1_P(pair3(), c3, 1.0 * std::pow(1e-3, 0.75), 1e-3), Error);
}

TEST_CASE("m = 1 lead is the first-order Landau-Zener expansion") {
    const double v = 2.0;
    const PotentialModel lz = PotentialModel::linear_lz(v);
    const CrossingCatalog cat = find_crossings(lz, -10.0, 10.0);
    Theorem1Options o;
    o.allow_m1 = true;
    o.enforce_regime = false;
    for (double eps : {1e-3, 1e-2}) {
        const double h = 0.01;
        const double x = std::numbers::pi * eps * eps / (v * h);
        const Theorem1Prediction t = theorem1_P(lz, cat, eps, h, o);
        CHECK(t.parity == 1);
        CHECK(1.0 - t.p_pred == doctest::Approx(x).epsilon(1e-12));
        CHECK(std::abs(t.p_pred - std::exp(-x)) <= 0.5 * x * x + 1e-15);
    }
}

TEST_CASE("theorem 2 with every crossing flat reduces to theorem 1") {
    const CrossingCatalog cat = find_crossings(pair3(), -10.0, 10.0);
    const double h = 0.004;
    const double eps = 0.01 * std::pow(h, 0.75);
    const Theorem1Prediction t1 = theorem1_P(pair3(), cat, eps, h);
    const Theorem2Prediction t2 = theorem2_L(pair3(), cat, eps, h, {Regime::NonAdiabatic, Regime::NonAdiabatic});
    CHECK(t2.n_odd_adiabatic == 0);
    CHECK(t2.parity == t1.parity);
    CHECK(t2.m_flat == 3);
    CHECK(t2.p_pred == doctest::Approx(t1.p_pred).epsilon(1e-9));
    CHECK(t2.sharp_diag == 0.0);
    CHECK(t2.sharp_sharp == 0.0);
}
