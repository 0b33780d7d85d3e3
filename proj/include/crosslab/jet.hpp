#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace crosslab {

// Truncated Taylor series c[0] + c[1] d + ... + c[n-1] d^{n-1}. Coefficient k
// equals f^{(k)}(t0)/k!, so derivatives come out exact up to rounding.
template <class T>
struct Jet {
    std::vector<T> c;

    Jet() = default;
    explicit Jet(std::size_t n, T value = T{}) : c(n, T{}) {
        if (n > 0) c[0] = value;
    }

    static Jet variable(std::size_t n, T t0) {
        Jet j(n, t0);
        if (n > 1) j.c[1] = T{1};
        return j;
    }

    [[nodiscard]] std::size_t size() const { return c.size(); }
    [[nodiscard]] T derivative(std::size_t k) const {
        T f = c[k];
        for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
        return f;
    }
};

template <class T>
Jet<T> operator+(Jet<T> a, const Jet<T>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a.c[k] += b.c[k];
    return a;
}
template <class T>
Jet<T> operator-(Jet<T> a, const Jet<T>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a.c[k] -= b.c[k];
    return a;
}
template <class T>
Jet<T> operator*(T s, Jet<T> a) {
    for (auto& x : a.c) x *= s;
    return a;
}
template <class T>
Jet<T> operator+(Jet<T> a, T s) {
    a.c[0] += s;
    return a;
}
template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
    const std::size_t n = a.size();
    Jet<T> r(n);
    for (std::size_t k = 0; k < n; ++k) {
        T s{};
        for (std::size_t j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
        r.c[k] = s;
    }
    return r;
}

template <class T>
Jet<T> reciprocal(const Jet<T>& a) {
    const std::size_t n = a.size();
    Jet<T> r(n);
    r.c[0] = T{1} / a.c[0];
    for (std::size_t k = 1; k < n; ++k) {
        T s{};
        for (std::size_t j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
        r.c[k] = -s / a.c[0];
    }
    return r;
}

template <class T>
Jet<T> ipow(const Jet<T>& a, int p) {
    Jet<T> r(a.size(), T{1});
    for (int i = 0; i < p; ++i) r = r * a;
    return r;
}

// exp(g) via k y_k = sum_j j g_j y_{k-j}.
template <class T>
Jet<T> exp(const Jet<T>& g) {
    using std::exp;
    const std::size_t n = g.size();
    Jet<T> y(n);
    y.c[0] = exp(g.c[0]);
    for (std::size_t k = 1; k < n; ++k) {
        T s{};
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * g.c[j] * y.c[k - j];
        y.c[k] = s / static_cast<double>(k);
    }
    return y;
}

// tanh(g) via z' = (1 - z^2) g'.
template <class T>
Jet<T> tanh(const Jet<T>& g) {
    using std::tanh;
    const std::size_t n = g.size();
    Jet<T> z(n);
    Jet<T> w(n);  // 1 - z^2, filled incrementally
    z.c[0] = tanh(g.c[0]);
    w.c[0] = T{1} - z.c[0] * z.c[0];
    for (std::size_t k = 1; k < n; ++k) {
        T s{};
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * g.c[j] * w.c[k - j];
        z.c[k] = s / static_cast<double>(k);
        T zz{};
        for (std::size_t j = 0; j <= k; ++j) zz += z.c[j] * z.c[k - j];
        w.c[k] = -zz;
    }
    return z;
}

// Antiderivative jet shifted so that the constant term is `value`.
template <class T>
Jet<T> integrate(const Jet<T>& a, T value) {
    const std::size_t n = a.size();
    Jet<T> r(n, value);
    for (std::size_t k = 1; k < n; ++k) r.c[k] = a.c[k - 1] / static_cast<double>(k);
    return r;
}

}  // namespace crosslab
