#include "crosslab/harness.hpp"
#include "crosslab/oscillatory.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace crosslab;

namespace {

// int_R exp(i c t^{m+1}) dt for c > 0: 2 Gamma(1 + 1/(m+1)) c^{-1/(m+1)} cos(pi/(2(m+1))) (m even)
// or Gamma(1 + 1/(m+1)) c^{-1/(m+1)} 2 e^{i pi/(2(m+1))} (m odd).
cplx monomial_phase_integral(int m, double c) {
    const double k = m + 1.0;
    const double g = std::tgamma(1.0 + 1.0 / k) * std::pow(c, -1.0 / k);
    if (m % 2 == 0) return 2.0 * g * std::cos(std::numbers::pi / (2.0 * k));
    return 2.0 * g * std::polar(1.0, std::numbers::pi / (2.0 * k));
}

}  // namespace

TEST_CASE("omega_m from monomial phase integrals") {
    // V = v t^m/m! gives the phase (2/h) v t^{m+1}/(m+1)!; take h = 1.
    for (int m = 1; m <= 5; ++m) {
        for (double v : {0.75, 6.0}) {
            const cplx ref = monomial_phase_integral(m, 2.0 * v / std::tgamma(m + 2.0));
            CHECK(std::abs(omega_m(m, v) - ref) < 1e-13 * std::abs(ref));
        }
    }
    // Negative slope conjugates for odd m.
    CHECK(std::abs(omega_m(3, -2.0) - std::conj(omega_m(3, 2.0))) < 1e-15);
    CHECK(std::abs(omega_m(2, -2.0) - omega_m(2, 2.0)) < 1e-15);
}

TEST_CASE("Gaussian-weighted Fresnel integral") {
    const PotentialModel lz = PotentialModel::linear_lz(1.0);
    const double inf = std::numeric_limits<double>::infinity();
    OscOptions o;
    o.tail_cut = 7.0;
    for (double h : {0.2, 0.05, 0.01}) {
        const cplx num = osc_integral(lz, -inf, inf, 0.0, h, [](double t) { return cplx(std::exp(-t * t)); }, 1, 1, o)
                             .value;
        CHECK(std::abs(num - std::sqrt(std::numbers::pi / cplx(1.0, -1.0 / h))) < 1e-10);
    }
}

TEST_CASE("stationary phase remainder order") {
    const double inf = std::numeric_limits<double>::infinity();
    OscOptions o;
    o.tail_cut = 7.0;
    for (int m = 1; m <= 3; ++m) {
        const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{m, 1.0, 0.0}});
        std::vector<double> hs;
        std::vector<double> rem;
        for (int j = 0; j < 6; ++j) {
            const double h = 0.04 * std::ldexp(1.0, -j);
            const cplx num = osc_integral(p, -inf, inf, 0.0, h, [](double t) { return cplx(1.0 / (1.0 + t * t)); }, 1, m, o)
                                 .value;
            hs.push_back(h);
            rem.push_back(std::abs(num - stationary_phase_leading(1.0, m, p.derivative(0.0, m), h)));
        }
        CHECK(fit_loglog(hs, rem).slope >= 2.0 / (m + 1.0) - 0.1);
    }
}

TEST_CASE("sign flip conjugates the integral for real amplitudes") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 0.0}});
    const auto f = [](double t) { return cplx(std::cos(t)); };
    const cplx a = osc_integral(p, -2.0, 1.5, 0.0, 0.03, f, 1, 3).value;
    const cplx b = osc_integral(p, -2.0, 1.5, 0.0, 0.03, f, -1, 3).value;
    CHECK(std::abs(a - std::conj(b)) < 1e-12);
}

TEST_CASE("non-stationary integrals are O(h)") {
    const PotentialModel p = PotentialModel::polynomial_windowed({2.0, 1.0}, 1.5, 0.25);
    double worst = 0.0;
    for (double h : {0.05, 0.01, 0.002}) {
        const cplx r = osc_integral(p, -1.0, 1.0, 0.0, h, [](double t) { return cplx(std::exp(t)); }, 1, 1).value;
        worst = std::max(worst, std::abs(r) / h);
    }
    CHECK(worst < 5.0);
}
