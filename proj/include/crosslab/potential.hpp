#pragma once

#include "crosslab/jet.hpp"
#include "crosslab/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crosslab {

enum class Family { ScaledTanhProduct, PolynomialWindowed, LinearLZ };
enum class Side { Left, Right };

[[nodiscard]] std::string to_string(Family f);

// One factor tanh^power(scale * (t - shift)) of a ScaledTanhProduct.
struct TanhFactor {
    int power = 1;
    double scale = 1.0;
    double shift = 0.0;
};

// V(t) for one of the builtin families. Values are immutable after construction.
//   ScaledTanhProduct:  c * prod_i tanh^{p_i}(s_i (t - b_i)), s_i > 0
//   PolynomialWindowed: p(g(t)) with g(t) = t on |t| <= L - w and g constant beyond |t| = L,
//                       joined by a C-infinity ramp of width w
//   LinearLZ:           v t (unbounded tails)
class PotentialModel {
public:
    [[nodiscard]] static PotentialModel scaled_tanh_product(double c, std::vector<TanhFactor> factors);
    [[nodiscard]] static PotentialModel polynomial_windowed(std::vector<double> coeffs, double window,
                                                            double ramp);
    [[nodiscard]] static PotentialModel linear_lz(double v);

    [[nodiscard]] Family family() const { return family_; }
    [[nodiscard]] double v_right() const { return v_right_; }
    [[nodiscard]] double v_left() const { return v_left_; }
    [[nodiscard]] bool has_finite_tails() const { return family_ != Family::LinearLZ; }

    [[nodiscard]] double eval(double t) const;
    // Analytic continuation; PolynomialWindowed is only analytic on the unramped core.
    [[nodiscard]] cplx eval(cplx t) const;
    [[nodiscard]] cplx derivative(cplx t) const;
    // Taylor jet of order n-1 at t (coefficient k = V^{(k)}(t)/k!).
    [[nodiscard]] Jet<double> jet(double t, std::size_t n) const;
    [[nodiscard]] double derivative(double t, int k) const;

    // Integral of V over [a, b].
    [[nodiscard]] double integral(double a, double b) const;
    // Right: int_t^inf (V - V_r). Left: int_{-inf}^t (V - V_l).
    [[nodiscard]] double tail_integral(Side side, double t) const;
    // Exponential decay rate of |V - V_tail| toward the given side.
    [[nodiscard]] double tail_decay_rate() const;
    // Length scale below which V is well resolved by a 20-point Gauss panel.
    [[nodiscard]] double resolution_scale() const;

    // Signed point beyond which |V - V_tail| < threshold on the given side.
    [[nodiscard]] double tail_anchor(Side side, double threshold = 1e-14) const;

    [[nodiscard]] double c() const { return c_; }
    [[nodiscard]] const std::vector<TanhFactor>& factors() const { return factors_; }
    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
    [[nodiscard]] double window() const { return window_; }
    [[nodiscard]] double ramp() const { return ramp_; }

private:
    PotentialModel() = default;
    void validate() const;
    [[nodiscard]] double window_map(double t) const;
    [[nodiscard]] Jet<double> window_map_jet(double t, std::size_t n) const;
    [[nodiscard]] double poly(double x) const;

    Family family_ = Family::LinearLZ;
    double c_ = 1.0;
    std::vector<TanhFactor> factors_;
    std::vector<double> coeffs_;
    double window_ = 0.0;
    double ramp_ = 0.0;
    double v_right_ = 0.0;
    double v_left_ = 0.0;
};

struct Crossing {
    double t = 0.0;
    int m = 1;
    double v = 0.0;  // V^{(m)}(t)
};

enum class Regime { NonAdiabatic, Adiabatic };

// Crossing data ordered t_1 > t_2 > ... > t_n.
struct CrossingCatalog {
    std::vector<Crossing> crossings;
    std::vector<int> sigma;  // sigma[k] = m_1 + ... + m_{k+1}
    int m_star = 0;
    std::vector<int> lambda_star;  // 0-based indices with m_k = m_star

    [[nodiscard]] std::size_t size() const { return crossings.size(); }
    [[nodiscard]] int sigma_n() const { return sigma.empty() ? 0 : sigma.back(); }
    // sigma_{k-1} for 0-based index k (sigma_0 = 0).
    [[nodiscard]] int sigma_before(std::size_t k) const { return k == 0 ? 0 : sigma[k - 1]; }
};

// Split of the crossings into non-adiabatic (flat) and adiabatic (sharp) groups.
struct RegimeSplit {
    std::vector<Regime> regime;  // per crossing
    int m_flat = 0;              // max order among non-adiabatic crossings
    int m_sharp = 0;             // min order among adiabatic crossings
    std::vector<int> lambda_flat;
    std::vector<int> lambda_sharp;
    std::vector<int> odd_sharp;  // odd-order adiabatic crossings, increasing index
};

[[nodiscard]] RegimeSplit make_split(const CrossingCatalog& cat, const std::vector<Regime>& regime);

struct FindOptions {
    int max_order = 16;
    int samples = 20000;
};

[[nodiscard]] CrossingCatalog find_crossings(const PotentialModel& model, double lo, double hi,
                                             const FindOptions& opt = {});

// 2 * int_{t_k}^{t_j} |V| for 0-based indices j <= k.
[[nodiscard]] double area_between(const CrossingCatalog& cat, const PotentialModel& model,
                                  std::size_t j, std::size_t k);
// 2 * int_a^b |V| split at zeros of V inside [a, b].
[[nodiscard]] double area_between_points(const PotentialModel& model, double a, double b);

struct RegularizedAction {
    double value = 0.0;
    double tail = 0.0;  // the tail integral term
};

// R_r = V_r t_r + int_{+inf}^{t_r} (V - V_r), R_l = V_l t_l + int_{-inf}^{t_l} (V - V_l).
// With require_nonvanishing_tail the tail term must exceed tail_floor in modulus.
[[nodiscard]] RegularizedAction regularized_action(const PotentialModel& model,
                                                   const CrossingCatalog& cat, Side side,
                                                   double anchor,
                                                   bool require_nonvanishing_tail = false,
                                                   double tail_floor = 1e-300);

// V with its sign flipped between consecutive pairs of odd adiabatic crossings.
class EffectivePotential {
public:
    EffectivePotential(const CrossingCatalog& cat, const RegimeSplit& split);

    [[nodiscard]] int sign(double t) const;
    [[nodiscard]] double integral(const PotentialModel& model, double a, double b) const;
    // Flip intervals (lo, hi); lo may be -inf.
    [[nodiscard]] const std::vector<std::pair<double, double>>& flips() const { return flips_; }
    [[nodiscard]] int n_odd_adiabatic() const { return n_odd_; }

private:
    std::vector<std::pair<double, double>> flips_;
    int n_odd_ = 0;
};

struct TurningPointPair {
    cplx zeta_1;  // nearest root toward arg pi/(2m)
    cplx zeta_m;  // nearest root toward arg pi(2m-1)/(2m)
    cplx action_1;
    cplx action_m;
    double a_1 = 0.0;  // Im A = a eps^{(m+1)/m} coefficients
    double a_m = 0.0;
    double a = 0.0;    // min(a_1, a_m)
    double a_limit = 0.0;           // eps -> 0 value from the local model
    double scaling_exponent = 0.0;  // measured from eps and eps/2, expected (m+1)/m
};

struct TurningPointOptions {
    int max_iter = 60;
    double tol = 1e-12;
};

[[nodiscard]] cplx turning_point(const PotentialModel& model, const Crossing& x, int j, double eps,
                                 const TurningPointOptions& opt = {});
// A = 2 int_{t_k}^{zeta} sqrt(V^2 + eps^2) along the straight segment, branch eps at t_k.
[[nodiscard]] cplx turning_action(const PotentialModel& model, const Crossing& x, cplx zeta,
                                  double eps);
[[nodiscard]] TurningPointPair turning_points(const PotentialModel& model, const CrossingCatalog& cat,
                                              std::size_t k, double eps,
                                              const TurningPointOptions& opt = {});
// Leading coefficient of Im A for the local model v (t - t_k)^m / m!.
[[nodiscard]] double local_decay_constant(int m, double v);

}  // namespace crosslab
