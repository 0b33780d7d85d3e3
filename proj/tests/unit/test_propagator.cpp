#include "crosslab/error.hpp"
#include "crosslab/propagator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace crosslab;

TEST_CASE("constant Hamiltonian matches the exponential") {
    // V = 0.7 on the window core.
    const PotentialModel p = PotentialModel::polynomial_windowed({0.7}, 10.0, 1.0);
    for (Stepper s : {Stepper::RKF78, Stepper::Magnus4}) {
        PropagatorOptions o;
        o.stepper = s;
        o.tol = 1e-12;
        const Mat2 m = fundamental_matrix(p, 0.3, 0.1, -2.0, 3.0, o);
        CHECK(max_abs(m - expm_hermitian_phase(0.7 * 5.0, 0.3 * 5.0, 0.1)) < 1e-9);
    }
}

TEST_CASE("flow properties on random problems") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5; ++i) {
        const PotentialModel p = PotentialModel::scaled_tanh_product(
            0.5 + u(rng), {{1 + static_cast<int>(rng() % 3), 0.5 + u(rng), 2.0 * u(rng) - 1.0}});
        const double eps = 0.05 + 0.3 * u(rng);
        const double h = 0.05 + 0.2 * u(rng);
        PropagatorOptions o;
        o.tol = 1e-11;
        PropagationStats st;
        const Mat2 m = fundamental_matrix(p, eps, h, -3.0, 3.0, o, &st);
        CHECK(unitarity_defect(m) < 1e-9);
        CHECK(st.steps > 0);
        const Mat2 c = fundamental_matrix(p, eps, h, 0.4, 3.0, o) * fundamental_matrix(p, eps, h, -3.0, 0.4, o);
        CHECK(max_abs(m - c) < 1e-9);
        // Backward propagation inverts.
        CHECK(max_abs(fundamental_matrix(p, eps, h, 3.0, -3.0, o) * m - Mat2::identity()) < 1e-9);
        CHECK(std::abs(m.det() - 1.0) < 1e-9);
        // (-conj(psi2), conj(psi1)) is again a solution.
        const Vec2 psi{cplx(0.3, 0.1), cplx(-0.2, 0.7)};
        const Vec2 a = propagate(p, eps, h, -3.0, 3.0, psi, o);
        const Vec2 b = propagate(p, eps, h, -3.0, 3.0, {-std::conj(psi.y), std::conj(psi.x)}, o);
        CHECK(std::abs(b.x + std::conj(a.y)) < 1e-9);
        CHECK(std::abs(b.y - std::conj(a.x)) < 1e-9);
    }
}

TEST_CASE("Magnus4 error scales as the fourth power of the tolerance-driven step") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.0, {{1, 1.0, 0.0}});
    PropagatorOptions ref;
    ref.tol = 1e-13;
    const Mat2 exact = fundamental_matrix(p, 0.2, 0.1, -4.0, 4.0, ref);
    PropagatorOptions o;
    o.stepper = Stepper::Magnus4;
    double prev = 0.0;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        o.tol = tol;
        const double err = max_abs(fundamental_matrix(p, 0.2, 0.1, -4.0, 4.0, o) - exact);
        CHECK(err < 100.0 * tol);
        if (prev > 0.0) CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("stepper names") {
    CHECK(stepper_from_string("magnus4") == Stepper::Magnus4);
    CHECK(to_string(Stepper::RKF78) == "rkf78");
    CHECK_THROWS_AS((void)stepper_from_string("euler"), Error);
}
