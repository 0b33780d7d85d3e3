#include "crosslab/error.hpp"
#include "crosslab/oscillatory.hpp"
#include "crosslab/scattering.hpp"
#include "crosslab/transfer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace crosslab;

namespace {

cplx rc(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng)};
}

}  // namespace

TEST_CASE("SU(2) algebra") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const SU2 a = SU2{rc(rng), rc(rng)}.normalized();
        const SU2 b = SU2{rc(rng), rc(rng)}.normalized();
        CHECK(a.defect() < 1e-15);
        CHECK(max_abs((a * b).matrix() - a.matrix() * b.matrix()) < 1e-15);
        CHECK(max_abs(a.q_conjugate().matrix() - kQ * a.matrix() * kQ) < 1e-15);
        CHECK(max_abs(a.conj().matrix() - a.matrix().conj()) == 0.0);
        CHECK(SU2::from_matrix(a.matrix()).a == a.a);
    }
}

TEST_CASE("smallness parameters") {
    CHECK(mu_m(0.05 * std::pow(1e-3, 0.75), 1e-3, 3) == doctest::Approx(0.05));
    CHECK(mu_tilde_1(0.01, 0.01) == doctest::Approx(std::sqrt(std::log(100.0)) * 0.1));
}

TEST_CASE("regime classification") {
    const Crossing x{0.0, 3, 6.0};
    CHECK(classify_crossing(x, 0.05 * std::pow(1e-3, 0.75), 1e-3) == Regime::NonAdiabatic);
    CHECK(classify_crossing(x, 20.0 * std::pow(1e-3, 0.75), 1e-3) == Regime::Adiabatic);
    CHECK_FALSE(classify_crossing(x, 1.0 * std::pow(1e-3, 0.75), 1e-3).has_value());
    RegimeThresholds p;
    p.mode = BandMode::Probability;
    // Flat: |omega|^2 mu^2 <= 0.05.
    const double mu_flat = std::sqrt(0.05) / std::abs(omega_m(3, 6.0));
    CHECK(classify_crossing(x, 0.99 * mu_flat * std::pow(1e-3, 0.75), 1e-3, p) == Regime::NonAdiabatic);
    CHECK_FALSE(classify_crossing(x, 1.01 * mu_flat * std::pow(1e-3, 0.75), 1e-3, p).has_value());
    CHECK(band_mode_from_string("probability") == BandMode::Probability);
    CHECK_THROWS_AS((void)band_mode_from_string("other"), Error);
}

TEST_CASE("non-adiabatic factor") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 0.0}});
    const CrossingCatalog cat = find_crossings(p, -10.0, 10.0);
    const double h = 1e-3;
    const double eps = 0.05 * std::pow(h, 0.75);
    const TransferFactor f = t_k_nonadiabatic(cat, 0, eps, h);
    const cplx w = omega_m(3, 6.0);
    const double n = std::sqrt(1.0 + 0.0025 * std::norm(w));
    CHECK(std::abs(f.m.matrix().b - cplx(0.0, -0.05) * w / n) < 1e-14);
    CHECK(f.m.defect() < 1e-15);
    CHECK_THROWS_AS((void)t_k_nonadiabatic(cat, 0, 100.0 * eps, h), Error);
}

TEST_CASE("adiabatic factor reproduces Landau-Zener for a linear crossing") {
    const PotentialModel lz = PotentialModel::linear_lz(1.5);
    const CrossingCatalog cat = find_crossings(lz, -10.0, 10.0);
    RegimeThresholds thr;
    thr.enforce = false;
    for (double eps : {0.3, 0.6}) {
        const double h = 0.05;
        const AdiabaticFactor f = t_k_adiabatic(lz, cat, 0, eps, h, thr);
        CHECK(std::norm(f.beta) == doctest::Approx(std::exp(-std::numbers::pi * eps * eps / (1.5 * h))).epsilon(1e-8));
        CHECK(f.w.defect() < 1e-14);
        CHECK(f.iq);
        const PredictedScattering s = predicted_scattering(lz, cat, eps, h, {Regime::Adiabatic}, thr);
        CHECK(s.p == doctest::Approx(std::exp(-std::numbers::pi * eps * eps / (1.5 * h))).epsilon(1e-8));
        CHECK(s.parity == 0);
    }
}

TEST_CASE("chain product and first-order tau21") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        std::vector<cplx> alpha(n);
        std::vector<cplx> beta(n);
        std::vector<cplx> nu(n);
        std::vector<SU2> fs;
        for (std::size_t k = 0; k < n; ++k) {
            beta[k] = std::polar(1e-3, u(rng));
            alpha[k] = std::polar(std::sqrt(1.0 - 1e-6), u(rng));
            nu[k] = std::polar(1.0, u(rng));
            fs.push_back({alpha[k], beta[k]});
            fs.push_back({nu[k], 0.0});
        }
        const SU2 prod = su2_chain_product(fs);
        const Tau21 t = tau21_perturbative(alpha, beta, nu);
        // Remainder is cubic in |beta| = 1e-3 with at most n^3 terms.
        CHECK(std::abs(t.tau21 - prod.b) < 216e-9);
        CHECK(t.modulus_sq == doctest::Approx(std::norm(t.tau21)).epsilon(1e-10));
        CHECK(prod.defect() < 1e-13);
    }
}

TEST_CASE("masked and direct chain products agree") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{1, 8.0, 3.0}, {3, 0.5, -3.0}});
    const CrossingCatalog cat = find_crossings(p, -20.0, 20.0);
    RegimeThresholds thr;
    thr.enforce = false;
    const double h = 1e-4;
    for (double alpha : {0.3, 0.65, 1.2}) {
        const double eps = std::pow(h, alpha);
        for (Regime a : {Regime::NonAdiabatic, Regime::Adiabatic}) {
            for (Regime b : {Regime::NonAdiabatic, Regime::Adiabatic}) {
                const PredictedScattering s = predicted_scattering(p, cat, eps, h, {a, b}, thr);
                CHECK(s.path_gap < 1e-12);
                CHECK(unitarity_defect(s.s) < 1e-12);
                const int n = (a == Regime::Adiabatic) + (b == Regime::Adiabatic);
                CHECK(s.parity == (cat.sigma_n() + n) % 2);
            }
        }
    }
    // Mixed regime against the propagator.
    const double eps = std::pow(h, 0.65);
    ScatteringOptions so;
    so.prop.stepper = Stepper::Magnus4;
    so.prop.tol = 1e-10;
    const double num = scattering_matrix(p, eps, h, so).p;
    const PredictedScattering s = predicted_scattering(p, cat, eps, h, {Regime::NonAdiabatic, Regime::Adiabatic}, thr);
    CHECK(s.p == doctest::Approx(num).epsilon(2e-3));
}
