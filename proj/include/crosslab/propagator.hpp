#pragma once

#include "crosslab/linalg.hpp"
#include "crosslab/potential.hpp"

#include <cstddef>
#include <functional>
#include <string>

namespace crosslab {

enum class Stepper { RKF78, Magnus4 };

[[nodiscard]] std::string to_string(Stepper s);
[[nodiscard]] Stepper stepper_from_string(const std::string& s);

struct PropagatorOptions {
    Stepper stepper = Stepper::RKF78;
    double tol = 1e-10;
    std::size_t max_steps = 100000000;
};

struct PropagationStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    // Largest observed | ||psi(t)|| - ||psi(t0)|| |, or the unitarity defect for matrices.
    double norm_drift = 0.0;
};

// H(t) = [[V, eps], [eps, -V]] for a plain coupling function; used when V is not a model.
using CouplingFn = std::function<double(double)>;

// Solves i h psi' = H(t; eps) psi from t0 to t1 (either direction).
[[nodiscard]] Vec2 propagate(const PotentialModel& model, double eps, double h, double t0, double t1,
                             const Vec2& psi0, const PropagatorOptions& opt = {},
                             PropagationStats* stats = nullptr);

// M(t1, t0): columns are the propagated basis vectors.
[[nodiscard]] Mat2 fundamental_matrix(const PotentialModel& model, double eps, double h, double t0,
                                      double t1, const PropagatorOptions& opt = {},
                                      PropagationStats* stats = nullptr);
[[nodiscard]] Mat2 fundamental_matrix(const CouplingFn& v, double eps, double h, double t0, double t1,
                                      const PropagatorOptions& opt = {},
                                      PropagationStats* stats = nullptr);

}  // namespace crosslab
