#pragma once

#include <array>
#include <complex>

namespace crosslab {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

struct Vec2 {
    cplx x{};
    cplx y{};
};

// Row-major 2x2 complex matrix [[a, b], [c, d]].
struct Mat2 {
    cplx a{}, b{}, c{}, d{};

    [[nodiscard]] static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    [[nodiscard]] static constexpr Mat2 diag(cplx p, cplx q) { return {p, 0.0, 0.0, q}; }
    [[nodiscard]] static Mat2 from_columns(const Vec2& c0, const Vec2& c1) {
        return {c0.x, c1.x, c0.y, c1.y};
    }

    [[nodiscard]] Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
    [[nodiscard]] cplx det() const { return a * d - b * c; }
    [[nodiscard]] cplx trace() const { return a + d; }
    [[nodiscard]] Mat2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    [[nodiscard]] Mat2 conj() const { return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)}; }
    [[nodiscard]] Mat2 inverse() const;
};

[[nodiscard]] inline Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}
[[nodiscard]] inline Mat2 operator+(const Mat2& l, const Mat2& r) {
    return {l.a + r.a, l.b + r.b, l.c + r.c, l.d + r.d};
}
[[nodiscard]] inline Mat2 operator-(const Mat2& l, const Mat2& r) {
    return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
}
[[nodiscard]] inline Mat2 operator*(cplx s, const Mat2& m) {
    return {s * m.a, s * m.b, s * m.c, s * m.d};
}
[[nodiscard]] inline Vec2 operator*(const Mat2& m, const Vec2& v) {
    return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

[[nodiscard]] double norm(const Vec2& v);
[[nodiscard]] double frobenius(const Mat2& m);
[[nodiscard]] double max_abs(const Mat2& m);
// ||M^dagger M - I|| in max-abs norm.
[[nodiscard]] double unitarity_defect(const Mat2& m);

// exp(M) for traceless M, using M^2 = -det(M) I.
[[nodiscard]] Mat2 expm_traceless(const Mat2& m);

// exp(-(i/h) K) for traceless Hermitian K = [[a, b], [conj(b), -a]].
[[nodiscard]] Mat2 expm_hermitian_phase(double a, cplx b, double h);

inline constexpr Mat2 kPauliZ{1.0, 0.0, 0.0, -1.0};
inline constexpr Mat2 kQ{0.0, 1.0, 1.0, 0.0};
// Complex structure J = [[0, -1], [1, 0]].
inline constexpr Mat2 kJ{0.0, -1.0, 1.0, 0.0};

}  // namespace crosslab
