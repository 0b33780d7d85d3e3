#include "crosslab/linalg.hpp"
#include "crosslab/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace crosslab;

namespace {

// Scaling and squaring with a Taylor sum; independent of the closed forms.
Mat2 expm_series(const Mat2& m) {
    const Mat2 a = (1.0 / 1024.0) * m;
    Mat2 term = Mat2::identity();
    Mat2 sum = Mat2::identity();
    for (int k = 1; k <= 25; ++k) {
        term = (1.0 / k) * (term * a);
        sum = sum + term;
    }
    for (int i = 0; i < 10; ++i) sum = sum * sum;
    return sum;
}

cplx rc(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng)};
}

}  // namespace

TEST_CASE("matrix basics") {
    const Mat2 m{1.0, 2.0, cplx(0.0, 1.0), 3.0};
    CHECK(std::abs(m.det() - cplx(3.0, -2.0)) < 1e-15);
    CHECK(max_abs(m * m.inverse() - Mat2::identity()) < 1e-14);
    CHECK(max_abs(m.adjoint().adjoint() - m) == 0.0);
    CHECK(unitarity_defect(kQ) == 0.0);
    CHECK(max_abs(kJ * kJ + Mat2::identity()) == 0.0);
}

TEST_CASE("traceless exponential matches the series oracle") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        const cplx a = rc(rng);
        const Mat2 m{a, rc(rng), rc(rng), -a};
        CHECK(max_abs(expm_traceless(m) - expm_series(m)) < 1e-12);
    }
}

TEST_CASE("Hermitian phase exponential is unitary and matches the series") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double a = u(rng);
        const cplx b = rc(rng);
        const double h = 0.1 + std::abs(u(rng));
        const Mat2 e = expm_hermitian_phase(a, b, h);
        CHECK(unitarity_defect(e) < 1e-13);
        const Mat2 k{a, b, std::conj(b), -a};
        CHECK(max_abs(e - expm_series(cplx(0.0, -1.0 / h) * k)) < 1e-11);
    }
}

TEST_CASE("quadrature rules") {
    const auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
    // int_0^2 e^{-x} cos 3x = [e^{-x}(3 sin 3x - cos 3x)/10]_0^2.
    const double exact = (std::exp(-2.0) * (3.0 * std::sin(6.0) - std::cos(6.0)) + 1.0) / 10.0;
    CHECK(std::abs(composite_gauss(f, 0.0, 2.0, 4) - exact) < 1e-14);
    CHECK(std::abs(integrate_adaptive(f, 0.0, 2.0) - exact) < 1e-14);
    CHECK(std::abs(integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0) -
                   std::sqrt(std::numbers::pi) / 2.0) < 1e-13);
    const GaussRule& g = gauss_legendre(5);
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], 8);
    CHECK(std::abs(s - 2.0 / 9.0) < 1e-15);
}
