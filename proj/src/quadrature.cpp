#include "crosslab/quadrature.hpp"
#include "crosslab/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace crosslab {

namespace {

GaussRule build_gauss(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[i] = -x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

template <class T>
T composite_impl(const std::function<T(double)>& f, double a, double b, int panels, int order) {
    const GaussRule& g = gauss_legendre(order);
    const double width = (b - a) / panels;
    T total{};
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        T s{};
        for (int i = 0; i < order; ++i) s += g.w[i] * f(mid + 0.5 * width * g.x[i]);
        total += 0.5 * width * s;
    }
    return total;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss(n)).first;
    return it->second;
}

double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels,
                       int order) {
    return composite_impl<double>(f, a, b, panels, order);
}

cplx composite_gauss_c(const std::function<cplx(double)>& f, double a, double b, int panels,
                     int order) {
    return composite_impl<cplx>(f, a, b, panels, order);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 20, rel_tol, &err, &l1);
    if (err > std::max(abs_tol, 10.0 * rel_tol * l1)) {
        throw Error(ErrorCode::QuadratureTolExceeded,
                    "adaptive quadrature error estimate " + std::to_string(err));
    }
    return v;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator.integrate([&](double u) { return f(a + u); }, rel_tol, &err, &l1);
    if (err > std::max(1e-15, 10.0 * rel_tol * l1)) {
        throw Error(ErrorCode::QuadratureTolExceeded,
                    "tail quadrature error estimate " + std::to_string(err));
    }
    return v;
}

}  // namespace crosslab
