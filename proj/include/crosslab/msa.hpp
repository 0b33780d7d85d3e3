#pragma once

#include "crosslab/linalg.hpp"
#include "crosslab/potential.hpp"
#include "crosslab/propagator.hpp"

#include <cstddef>
#include <vector>

namespace crosslab {

struct MsaOptions {
    std::size_t min_points = 4096;
    double phase_step = 0.05;  // max change of 2 Phi / h between grid nodes
    int depth = 3;
    bool doubling_check = true;
};

// Uniform grid on [lo, hi] with Phi(t) = int_{t0}^t V and u+(t) = exp(-(i/h) Phi(t)).
struct MsaGrid {
    double lo = 0.0;
    double hi = 0.0;
    double t0 = 0.0;
    double h = 1.0;
    std::vector<double> t;
    std::vector<double> phi;
    std::vector<cplx> up;

    [[nodiscard]] std::size_t size() const { return t.size(); }
    [[nodiscard]] double dt() const { return (hi - lo) / static_cast<double>(t.size() - 1); }
    // Nearest node to x.
    [[nodiscard]] std::size_t index_of(double x) const;
    // Every other node of this grid (size must be odd).
    [[nodiscard]] MsaGrid coarsened() const;
};

// Picks the node count from the phase budget, rounded up to 2^k + 1.
[[nodiscard]] MsaGrid make_msa_grid(const PotentialModel& model, double t0, double lo, double hi, double h,
                                    const MsaOptions& opt = {});

// Cumulative integral int_{t[ia]}^{t[i]} g on the grid, fourth order.
[[nodiscard]] std::vector<cplx> cumulative_integral(const std::vector<cplx>& g, double dt, std::size_t ia);

// K^{+-}_a f (t) = (i/h) u^{+-}(t) int_a^t f / u^{+-}; sign = +1 or -1. `a` snaps to the nearest node.
[[nodiscard]] std::vector<cplx> apply_K(const MsaGrid& g, int sign, double a, const std::vector<cplx>& f);

// (u^{+-})^{-1} K^{+-}_a (u^{-+} f) = (i/h) int_a^t exp(+-2i Phi/h) f.
[[nodiscard]] std::vector<cplx> k_cross_amplitude(const MsaGrid& g, int sign, double a,
                                                  const std::vector<cplx>& f);

// ||f||_q = sup |f| + h^q sup |f'| with centered differences for f'.
[[nodiscard]] double q_norm(const MsaGrid& g, const std::vector<cplx>& f, double q);

enum class MsaWhich { W1, W2 };

struct MsaSolution {
    MsaGrid grid;
    MsaWhich which = MsaWhich::W1;
    double a_plus = 0.0;
    double a_minus = 0.0;
    int depth = 0;
    // psi_1 = u+ A, psi_2 = u- B.
    std::vector<cplx> amp_a;
    std::vector<cplx> amp_b;
    std::vector<double> term_sup;  // sup of successive eps^k terms
    double tail_bound = 0.0;       // mu^{2(depth+1)}
    double residual = 0.0;         // h max |A' + (i eps/h) e^{2i Phi/h} B| (and the B equation)

    [[nodiscard]] Vec2 value(std::size_t i) const;
};

// Truncated successive-approximation series; mu is the local parameter eps h^{-m/(m+1)}.
[[nodiscard]] MsaSolution msa_solution(const MsaGrid& grid, double eps, MsaWhich which, double a_plus,
                                       double a_minus, int depth, double mu);

// Default interval: half the distance to the neighbouring crossings or the tail anchors.
[[nodiscard]] std::pair<double, double> msa_interval(const PotentialModel& model, const CrossingCatalog& cat,
                                                     std::size_t k);

struct ConnectionResult {
    Mat2 t_msa;
    Mat2 t_prop;
    double mu = 0.0;
    double series_bound = 0.0;
    double grid_error = 0.0;  // |T(N) - T(N/2)| from the doubling check
    std::size_t points = 0;
};

// T = (w_{1,r} w_{2,r})^{-1} (w_{1,l} w_{2,l}) evaluated at t = r, with the propagator cross-check
// T = diag(u-(r), u+(r)) M(r, l) diag(u+(l), u-(l)).
[[nodiscard]] ConnectionResult connection_T_numeric(const PotentialModel& model, const CrossingCatalog& cat,
                                                    std::size_t k, double eps, double h, double ell, double r,
                                                    const MsaOptions& opt = {},
                                                    const PropagatorOptions& prop = {});

}  // namespace crosslab
