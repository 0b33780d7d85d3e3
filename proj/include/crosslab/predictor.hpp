#pragma once

#include "crosslab/potential.hpp"
#include "crosslab/transfer.hpp"

#include <string>
#include <vector>

namespace crosslab {

// gamma_m = 4 ((m+1)!/2)^{2/(m+1)} Gamma((m+2)/(m+1))^2, times cos^2(pi/(2(m+1))) for even m.
[[nodiscard]] double gamma_star(int m);

// Phase offset of the cross terms for odd m and opposite slopes.
enum class ThetaConvention {
    Theorem,       // sgn(v_j) pi/(m+1)
    ProofDisplay,  // sgn(v_j) pi/(2(m+1))
};

[[nodiscard]] std::string to_string(ThetaConvention c);
[[nodiscard]] ThetaConvention theta_from_string(const std::string& s);

[[nodiscard]] double theta_jk(int m, double v_j, double v_k, ThetaConvention c = ThetaConvention::Theorem);

// sum_{j in Lambda*} |v_j|^{-2/(m+1)} + 2 sum_{j<k} |v_j v_k|^{-1/(m+1)} cos((2/h) int_{t_k}^{t_j} V + theta).
[[nodiscard]] double delta_star(const PotentialModel& model, const CrossingCatalog& cat, double h,
                                ThetaConvention c = ThetaConvention::Theorem);

struct Theorem1Options {
    ThetaConvention theta = ThetaConvention::Theorem;
    double mu_max = 0.1;
    bool enforce_regime = true;
    // Evaluates m* = 1 instead of refusing; the leading term is then the first-order Landau-Zener expansion.
    bool allow_m1 = false;
};

struct Theorem1Prediction {
    int parity = 0;  // sigma_n mod 2
    int m_star = 0;
    double mu_star = 0.0;
    double gamma_star = 0.0;
    double delta_star = 0.0;
    double c_star = 0.0;
    double p_pred = 0.0;
    std::string error_order;
};

[[nodiscard]] Theorem1Prediction theorem1_P(const PotentialModel& model, const CrossingCatalog& cat,
                                            double eps, double h, const Theorem1Options& opt = {});

struct InterferenceZero {
    double h = 0.0;
    double delta = 0.0;
    bool exact = false;  // from the closed-form ladder or a root of delta_* = 0
    int k = 0;           // ladder index for the closed form
};

// Zeros (or minima) of delta_* for h in [h_lo, h_hi], in increasing h.
[[nodiscard]] std::vector<InterferenceZero> interference_zeros(const PotentialModel& model,
                                                               const CrossingCatalog& cat, double h_lo,
                                                               double h_hi,
                                                               ThetaConvention c = ThetaConvention::Theorem);

struct Theorem2Prediction {
    int n_odd_adiabatic = 0;
    int parity = 0;  // (sigma_n + N) mod 2
    double leading = 0.0;  // L(eps, h)
    double flat_flat = 0.0;
    double sharp_diag = 0.0;
    double flat_sharp = 0.0;
    double sharp_sharp = 0.0;
    double p_pred = 0.0;
    double mu_flat = 0.0;
    double mu_sharp = 0.0;
    int m_flat = 0;
    int m_sharp = 0;
    double a = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    // Pair coefficients term_j conj(term_k) for j < k, with the block name.
    struct Pair {
        int j = 0;
        int k = 0;
        std::string block;
        cplx c;
    };
    std::vector<Pair> pairs;
    std::vector<int> effective_sign;  // sign of V~ on each gap (t_{k+1}, t_k), index k
};

// Leading term L from the masked chain restricted to flat and sharp extremal orders.
[[nodiscard]] Theorem2Prediction theorem2_L(const PotentialModel& model, const CrossingCatalog& cat, double eps,
                                            double h, const std::vector<Regime>& regime,
                                            const RegimeThresholds& thr = {});

}  // namespace crosslab
