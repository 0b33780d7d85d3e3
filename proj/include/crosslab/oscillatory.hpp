#pragma once

#include "crosslab/linalg.hpp"
#include "crosslab/potential.hpp"

#include <cstddef>
#include <functional>

namespace crosslab {

// omega_m = 2 ((m+1)!/(2|v|))^{1/(m+1)} Gamma((m+2)/(m+1)) eta_m,
// eta_m = cos(pi/(2(m+1))) for even m, exp(i sgn(v) pi/(2(m+1))) for odd m.
[[nodiscard]] cplx omega_m(int m, double v);

struct OscOptions {
    double tol = 1e-12;             // absolute, per panel
    double panel_fraction = 0.125;  // panel phase budget in radians
    double max_panel = 0.25;
    int max_bisect = 16;
    // Finite cut used when an endpoint is infinite; the rest is added by
    // integration by parts.
    double tail_cut = 0.0;
    int tail_terms = 2;
};

struct OscResult {
    cplx value;
    double error_estimate = 0.0;
    std::size_t panels = 0;
};

// Generic oscillatory quadrature of amp(t) exp(sign (i/h) int_origin^t rate) over [lo, hi].
struct OscProblem {
    double lo = 0.0;
    double hi = 0.0;
    double origin = 0.0;
    double h = 1.0;
    int sign = 1;
    std::function<double(double)> rate;
    std::function<cplx(double)> amp;
    double floor = 0.0;         // minimum panel length within floor_radius of origin
    double floor_radius = 0.0;
};

[[nodiscard]] OscResult oscillatory_quadrature(const OscProblem& p, const OscOptions& opt = {});

// I(h) = int_lo^hi f(t) exp(sign (2i/h) int_{t0}^t V). Endpoints may be infinite.
// `order` is the vanishing order of V at t0 and sets the panel floor h^{1/(m+1)}/8.
[[nodiscard]] OscResult osc_integral(const PotentialModel& model, double lo, double hi, double t0,
                                     double h, const std::function<cplx(double)>& f, int sign = 1,
                                     int order = 1, const OscOptions& opt = {});

// f(t0) omega_m h^{1/(m+1)}.
[[nodiscard]] cplx stationary_phase_leading(cplx f_t0, int m, double v, double h);

}  // namespace crosslab
