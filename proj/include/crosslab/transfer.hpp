#pragma once

#include "crosslab/linalg.hpp"
#include "crosslab/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crosslab {

// [[a, -conj(b)], [b, conj(a)]].
struct SU2 {
    cplx a{1.0, 0.0};
    cplx b{};

    [[nodiscard]] static SU2 identity() { return {}; }
    // Reads (a, b) from the first column; no check that m has SU(2) form.
    [[nodiscard]] static SU2 from_matrix(const Mat2& m) { return {m.a, m.c}; }
    [[nodiscard]] Mat2 matrix() const { return {a, -std::conj(b), b, std::conj(a)}; }
    [[nodiscard]] double defect() const { return std::abs(std::norm(a) + std::norm(b) - 1.0); }
    // Q M Q.
    [[nodiscard]] SU2 q_conjugate() const { return {std::conj(a), -std::conj(b)}; }
    // Entrywise complex conjugate.
    [[nodiscard]] SU2 conj() const { return {std::conj(a), std::conj(b)}; }
    // Divides by sqrt(|a|^2 + |b|^2).
    [[nodiscard]] SU2 normalized() const;
};

[[nodiscard]] SU2 operator*(const SU2& l, const SU2& r);

// mu_m = eps h^{-m/(m+1)}.
[[nodiscard]] double mu_m(double eps, double h, int m);
// sqrt(log(1/h)) eps h^{-1/2}; the smallness parameter used for m = 1 non-adiabatic crossings.
[[nodiscard]] double mu_tilde_1(double eps, double h);

enum class BandMode {
    Mu,           // flat if mu_m <= flat_max (mu~_1 for m = 1), sharp if mu_m >= sharp_min
    Probability,  // flat if |omega_m|^2 mu_m^2 <= prob_max, sharp if 4 exp(-2 a mu^{(m+1)/m}) <= prob_max
};

struct RegimeThresholds {
    BandMode mode = BandMode::Mu;
    double flat_max = 0.1;
    double sharp_min = 10.0;
    double prob_max = 0.05;
    bool enforce = true;
};

[[nodiscard]] std::string to_string(BandMode m);
[[nodiscard]] BandMode band_mode_from_string(const std::string& s);

// Regime of one crossing, or nullopt inside the forbidden band. The Probability mode uses the
// leading single-crossing transition estimates; a is the local-model decay constant.
[[nodiscard]] std::optional<Regime> classify_crossing(const Crossing& x, double eps, double h,
                                                      const RegimeThresholds& thr = {});

struct TransferFactor {
    SU2 m;
    std::string error_order;
};

// [[1, -i omega mu], [-i conj(omega) mu, 1]] / sqrt(1 + mu^2 |omega|^2).
[[nodiscard]] TransferFactor t_k_nonadiabatic(const CrossingCatalog& cat, std::size_t k, double eps, double h,
                                              const RegimeThresholds& thr = {});

// diag(nu, conj(nu)) with nu = exp(-(i/h) int_{t_{k+1}}^{t_k} V), 0-based k < n-1.
[[nodiscard]] TransferFactor t_between(const PotentialModel& model, const CrossingCatalog& cat, std::size_t k,
                                       double h);

struct AdiabaticFactor {
    SU2 w;          // T^w built from alpha and beta
    SU2 prime;      // T' (SU(2) part after the case-table dressing)
    bool iq = false;  // T^(A) = iQ T' when m_k is odd
    cplx alpha;
    cplx beta;
    // |exp(-(i/2h)(conj(A_1) - A_m))|; beta is this envelope times a bounded interference factor.
    double beta_envelope = 0.0;
    double a_k = 0.0;  // Im A = a_k eps^{(m+1)/m} coefficient (min over the two turning points)
    std::string error_order;

    // The full factor T^(A), including iQ.
    [[nodiscard]] Mat2 full() const;
};

[[nodiscard]] AdiabaticFactor t_k_adiabatic(const PotentialModel& model, const CrossingCatalog& cat,
                                            std::size_t k, double eps, double h,
                                            const RegimeThresholds& thr = {});

[[nodiscard]] SU2 su2_chain_product(const std::vector<SU2>& factors);

struct Tau21 {
    cplx tau21;                // first-order sum
    std::vector<cplx> terms;   // summand j of the first-order sum
    double modulus_sq = 0.0;   // |tau21|^2 from the pairwise formula with alpha products
};

// First-order tau21 for the chain T_1 T_{1,2} ... T_n T_{n,n+1} with factor data (alpha_k, beta_k)
// and between phases nu_k (nu_n closes the chain).
[[nodiscard]] Tau21 tau21_perturbative(const std::vector<cplx>& alpha, const std::vector<cplx>& beta,
                                       const std::vector<cplx>& nu);

struct ChainFactor {
    std::string label;  // "T_k" or "T_k,k+1"
    SU2 m;              // SU(2) part (T' for crossings)
    bool iq = false;
    bool masked = false;  // Q-conjugated in the masked product
    std::string error_order;
};

// Ordered factors T_1, T_{1,2}, ..., T_n, T_{n,n+1}.
struct TransferChain {
    std::vector<ChainFactor> factors;
    std::vector<Regime> regime;
    int n_odd_adiabatic = 0;
    bool apply_j = false;  // sigma_n odd
};

struct PredictedScattering {
    Mat2 s;         // direct product with iQ kept inside
    Mat2 s_masked;  // T_r^{-1} (prod of masked SU(2) factors) (iQ)^N J^{sigma_n}
    double p = 0.0;
    double path_gap = 0.0;  // max_abs(s - s_masked)
    int parity = 0;         // (sigma_n + N) mod 2
    TransferChain chain;
    std::vector<cplx> alpha;  // (1,1) entries of the masked SU(2) crossing factors
    std::vector<cplx> beta;   // (2,1) entries
    std::vector<cplx> nu;     // masked between phases, nu_n from R_l
};

// S = T_r^{-1} T_1 T_{1,2} ... T_n T_l for the given regime assignment. Without finite tails the
// connector phases are set to 1; P does not depend on them.
[[nodiscard]] PredictedScattering predicted_scattering(const PotentialModel& model, const CrossingCatalog& cat,
                                                       double eps, double h, const std::vector<Regime>& regime,
                                                       const RegimeThresholds& thr = {});

}  // namespace crosslab
