#pragma once

#include "crosslab/linalg.hpp"

#include <functional>
#include <vector>

namespace crosslab {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule with n nodes, cached per n.
[[nodiscard]] const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre with `panels` equal panels of `order` nodes.
[[nodiscard]] double composite_gauss(const std::function<double(double)>& f, double a, double b,
                                     int panels, int order = 20);
[[nodiscard]] cplx composite_gauss_c(const std::function<cplx(double)>& f, double a, double b,
                                   int panels, int order = 20);

// Adaptive Gauss-Kronrod (21 points); throws QuadratureTolExceeded when the
// error estimate stays above max(abs_tol, rel_tol * L1).
[[nodiscard]] double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                        double rel_tol = 1e-13, double abs_tol = 1e-15);

// Integral over [a, +inf) of a decaying integrand (exp-sinh).
[[nodiscard]] double integrate_to_infinity(const std::function<double(double)>& f, double a,
                                           double rel_tol = 1e-13);

}  // namespace crosslab
