#include "crosslab/error.hpp"
#include "crosslab/potential.hpp"
#include "crosslab/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace crosslab;

namespace {

double fact(int m) { return std::tgamma(m + 1.0); }

// Im 2 int_0^zeta sqrt((v t^m/m!)^2 + eps^2) dt along the ray to the turning point, by tanh-sinh.
double local_decay_oracle(int m, double v, double eps) {
    const double rho = std::pow(fact(m) * eps / std::abs(v), 1.0 / m);
    const cplx dir = std::polar(1.0, std::numbers::pi / (2.0 * m));
    const auto integrand = [&](double s, int part) {
        const cplx t = rho * s * dir;
        const cplx vt = v * std::pow(t, m) / fact(m);
        const cplx r = std::sqrt(vt * vt + eps * eps) * rho * dir;
        return part == 0 ? r.real() : r.imag();
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double im = ts.integrate([&](double s) { return integrand(s, 1); }, 0.0, 1.0);
    return 2.0 * im / std::pow(eps, (m + 1.0) / m);
}

}  // namespace

TEST_CASE("crossings of a tanh product") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 2.0}, {1, 2.0, -2.0}});
    const CrossingCatalog cat = find_crossings(p, -10.0, 10.0);
    REQUIRE(cat.size() == 2);
    CHECK(cat.crossings[0].t == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(cat.crossings[0].m == 3);
    CHECK(cat.crossings[1].t == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(cat.crossings[1].m == 1);
    // V'''(2) = 6 tanh(8), V'(-2) = 2 tanh^3(-4).
    CHECK(cat.crossings[0].v == doctest::Approx(6.0 * std::tanh(8.0)).epsilon(1e-8));
    CHECK(cat.crossings[1].v == doctest::Approx(2.0 * std::pow(std::tanh(-4.0), 3)).epsilon(1e-8));
    CHECK(cat.sigma == std::vector<int>{3, 4});
    CHECK(cat.m_star == 3);
    CHECK(cat.lambda_star == std::vector<int>{0});
    CHECK(p.v_right() == doctest::Approx(1.0));
    CHECK(p.v_left() == doctest::Approx(1.0));
}

TEST_CASE("integrals against adaptive quadrature") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(0.7, {{2, 1.5, 0.5}, {1, 0.8, -1.0}});
    const auto v = [&](double t) { return p.eval(t); };
    CHECK(p.integral(-3.0, 2.5) == doctest::Approx(integrate_adaptive(v, -3.0, 2.5)).epsilon(1e-12));
    const double tr = integrate_to_infinity([&](double s) { return p.eval(1.0 + s) - p.v_right(); }, 0.0);
    CHECK(p.tail_integral(Side::Right, 1.0) == doctest::Approx(tr).epsilon(1e-10));
    const double tl = integrate_to_infinity([&](double s) { return p.eval(-1.0 - s) - p.v_left(); }, 0.0);
    CHECK(p.tail_integral(Side::Left, -1.0) == doctest::Approx(tl).epsilon(1e-10));
    const CrossingCatalog cat = find_crossings(p, -10.0, 10.0);
    REQUIRE(cat.size() == 2);
    const double area = 2.0 * integrate_adaptive([&](double t) { return std::abs(p.eval(t)); }, cat.crossings[1].t,
                                                 cat.crossings[0].t);
    CHECK(area_between(cat, p, 0, 1) == doctest::Approx(area).epsilon(1e-10));
}

TEST_CASE("windowed polynomial is constant beyond the window") {
    const PotentialModel p = PotentialModel::polynomial_windowed({0.0, 1.0}, 8.0, 2.0);
    CHECK(p.eval(3.0) == doctest::Approx(3.0));
    CHECK(p.eval(9.0) == doctest::Approx(p.v_right()));
    CHECK(p.eval(20.0) == p.eval(9.0));
    CHECK(p.v_left() == doctest::Approx(-p.v_right()));
    const CrossingCatalog cat = find_crossings(p, -10.0, 10.0);
    REQUIRE(cat.size() == 1);
    CHECK(cat.crossings[0].v == doctest::Approx(1.0));
}

TEST_CASE("invalid models are rejected") {
    CHECK_THROWS_AS((void)PotentialModel::scaled_tanh_product(1.0, {{1, -1.0, 0.0}}), Error);
    CHECK_THROWS_AS((void)PotentialModel::linear_lz(0.0), Error);
}

TEST_CASE("local decay constant") {
    // Landau-Zener: Im A = pi eps^2 / (2 v).
    CHECK(local_decay_constant(1, 8.0) == doctest::Approx(std::numbers::pi / 16.0).epsilon(1e-12));
    for (int m : {2, 3, 5}) {
        CHECK(local_decay_constant(m, 1.3) == doctest::Approx(local_decay_oracle(m, 1.3, 1e-3)).epsilon(1e-8));
    }
}

TEST_CASE("turning points converge to the local model") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{3, 1.0, 0.0}});
    const CrossingCatalog cat = find_crossings(p, -10.0, 10.0);
    const TurningPointPair tp = turning_points(p, cat, 0, 1e-3);
    CHECK(tp.a_limit == doctest::Approx(local_decay_constant(3, 6.0)));
    // tanh^3 t = t^3 - t^5 + ..., so the relative correction is O(zeta^2) = O(eps^{2/3}).
    const TurningPointPair tq = turning_points(p, cat, 0, 1e-5);
    const double r3 = tp.a / tp.a_limit - 1.0;
    const double r5 = tq.a / tq.a_limit - 1.0;
    CHECK(r3 < 1e-2);
    CHECK(std::log10(r3 / r5) / 2.0 == doctest::Approx(2.0 / 3.0).epsilon(0.02));
    CHECK(tq.scaling_exponent == doctest::Approx(4.0 / 3.0).epsilon(1e-3));
    CHECK(std::abs(p.eval(tp.zeta_1) * p.eval(tp.zeta_1) + 1e-6) < 1e-16);
    // Small eps on a steep m = 1 crossing.
    const PotentialModel s = PotentialModel::scaled_tanh_product(1.0, {{1, 8.0, 3.0}, {3, 0.5, -3.0}});
    const CrossingCatalog sc = find_crossings(s, -20.0, 20.0);
    CHECK_NOTHROW((void)turning_points(s, sc, 0, 2.5e-3));
}

TEST_CASE("effective potential flips between odd adiabatic pairs") {
    const PotentialModel p =
        PotentialModel::scaled_tanh_product(1.0, {{1, 1.0, 4.0}, {3, 1.0, 0.0}, {1, 1.0, -4.0}});
    const CrossingCatalog cat = find_crossings(p, -20.0, 20.0);
    REQUIRE(cat.size() == 3);
    const RegimeSplit split = make_split(cat, {Regime::Adiabatic, Regime::NonAdiabatic, Regime::Adiabatic});
    CHECK(split.odd_sharp == std::vector<int>{0, 2});
    CHECK(split.m_flat == 3);
    CHECK(split.m_sharp == 1);
    const EffectivePotential ep(cat, split);
    CHECK(ep.n_odd_adiabatic() == 2);
    CHECK(ep.sign(5.0) == 1);
    CHECK(ep.sign(2.0) == -1);
    CHECK(ep.sign(-2.0) == -1);
    CHECK(ep.sign(-5.0) == 1);
    CHECK(ep.integral(p, -2.0, 2.0) == doctest::Approx(-p.integral(-2.0, 2.0)));
}
