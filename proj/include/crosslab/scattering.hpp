#pragma once

#include "crosslab/linalg.hpp"
#include "crosslab/potential.hpp"
#include "crosslab/propagator.hpp"

#include <string>

namespace crosslab {

// theta with tan(2 theta) = eps / v, 0 <= theta <= pi/2, evaluated without cancellation.
[[nodiscard]] double jost_angle(double v, double eps);

struct JostAngles {
    double theta_r = 0.0;
    double theta_l = 0.0;
    // pi/2 - theta_l; the angle with tan(2 eta) = eps / (-V_l) used when V_l < 0.
    double eta_l = 0.0;
};

[[nodiscard]] JostAngles jost_angles(const PotentialModel& model, double eps);

// Free solutions (phi+, phi-) of the constant Hamiltonian [[v, eps], [eps, -v]] at time t:
// phi+ = e^{-i lambda t/h} (cos theta, sin theta), phi- = e^{+i lambda t/h} (-sin theta, cos theta).
[[nodiscard]] Mat2 free_basis(double v, double eps, double h, double t);

struct JostTail {
    double d = 0.0;   // int (V - V_tail) over the tail beyond T
    cplx e;           // same integral weighted by exp(2 i lambda s / h)
    double e_bound = 0.0;  // a priori bound used to drop e
};

// (J+, J-) at t = T: free basis corrected by the tail evolution U(T).
[[nodiscard]] Mat2 jost_basis(const PotentialModel& model, double eps, double h, Side side, double t,
                              JostTail* tail = nullptr);

struct ScatteringOptions {
    PropagatorOptions prop;
    // Truncation points; NaN selects the tail anchors at threshold 1e-14.
    double t_right = std::numeric_limits<double>::quiet_NaN();
    double t_left = std::numeric_limits<double>::quiet_NaN();
};

struct ScatteringReport {
    Mat2 s;
    double p = 0.0;
    double t_right = 0.0;
    double t_left = 0.0;
    double unitarity_defect = 0.0;
    JostTail tail_right;
    JostTail tail_left;
    PropagationStats stats;
    // True when the ends use instantaneous eigenvectors (unbounded tails).
    bool adiabatic_ends = false;
};

[[nodiscard]] ScatteringReport scattering_matrix(const PotentialModel& model, double eps, double h,
                                                 const ScatteringOptions& opt = {});

// Leading-order connectors between Jost solutions and the local solutions at the
// outermost crossings. `error_diag` and `error_off` name the dropped orders.
struct Connector {
    Mat2 m;
    double action = 0.0;  // R_r or R_l
    std::string error_diag;
    std::string error_off;
};

[[nodiscard]] Connector connector_T_r(const PotentialModel& model, const CrossingCatalog& cat, double h,
                                      double anchor);
[[nodiscard]] Connector connector_T_ell(const PotentialModel& model, const CrossingCatalog& cat, double h,
                                        double anchor);
// First anchor outside the crossings where the tail integral exceeds `floor` in modulus.
[[nodiscard]] double default_anchor(const PotentialModel& model, const CrossingCatalog& cat, Side side,
                                    double floor = 1e-12);

// Right Jost basis at t written in the gauge of u_r^{+-}(t) = exp(-+(i/h) int_{t_r}^t V) and
// stripped of the connector phases; close to I with O(eps) off-diagonal entries.
[[nodiscard]] Mat2 jost_gauge_matrix(const PotentialModel& model, const CrossingCatalog& cat, double eps,
                                     double h, double t, double anchor,
                                     const PropagatorOptions& prop = {});

}  // namespace crosslab
