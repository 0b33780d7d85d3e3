#pragma once

#include "crosslab/config.hpp"
#include "crosslab/potential.hpp"
#include "crosslab/predictor.hpp"
#include "crosslab/propagator.hpp"
#include "crosslab/transfer.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace crosslab {

inline constexpr const char* kCsvSchemaVersion = "crosslab-rows/1";

struct Row {
    std::size_t row = 0;
    double eps = 0.0;
    double h = 0.0;
    int m_star = 0;
    double mu_star = 0.0;
    std::string regime_tag;  // one of N, A, - per crossing (t descending)
    std::string status = "OK";  // OK, SKIPPED_REGIME or ERROR:<code>
    int parity = 0;             // (sigma_n + N) mod 2
    double p_numeric = std::numeric_limits<double>::quiet_NaN();
    double p_theorem1 = std::numeric_limits<double>::quiet_NaN();
    double p_theorem2 = std::numeric_limits<double>::quiet_NaN();
    double p_chain = std::numeric_limits<double>::quiet_NaN();
    double unitarity_defect = std::numeric_limits<double>::quiet_NaN();
    std::size_t steps = 0;
    std::string error;  // prediction failures, "oracle:code" separated by ';'
};

// The crossing catalog is shared by all rows.
struct SweepSetup {
    PotentialModel model;
    CrossingCatalog cat;
};

[[nodiscard]] SweepSetup make_setup(const SweepConfig& c);

// Evaluates one (eps, h) point. Numeric failures set status; prediction failures go to `error`.
[[nodiscard]] Row evaluate_row(const SweepSetup& s, const SweepConfig& c, std::size_t index, double eps, double h);

// Rows in grid order; `jobs` workers (0: hardware concurrency).
[[nodiscard]] std::vector<Row> run_sweep(const SweepConfig& c);
[[nodiscard]] std::vector<Row> run_sweep(const SweepSetup& s, const SweepConfig& c,
                                         const std::vector<std::pair<double, double>>& points);

// Runs f(i) for i in [0, n) on a pool of `jobs` threads; exceptions are rethrown after the join.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double x_lo = 0.0;  // fit window on the x axis
    double x_hi = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
    double expected = std::numeric_limits<double>::quiet_NaN();
};

// Least squares of log y on log x. Points with y <= 100 noise_floor (or non-finite) are excluded.
[[nodiscard]] RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                                 double noise_floor = 0.0, std::size_t min_points = 5);
// Least squares of y on x.
[[nodiscard]] RateFit fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                                 std::size_t min_points = 5);

using RowQuantity = std::function<double(const Row&)>;

[[nodiscard]] RateFit fit_rate(const std::vector<Row>& rows, const RowQuantity& quantity, const RowQuantity& axis,
                               double noise_floor = 0.0, std::size_t min_points = 5);

struct InterferenceScan {
    double mu = 0.0;
    int parity = 0;
    std::vector<double> h;
    std::vector<double> normalized;  // P/mu^2, or (1 - P)/mu^2 for odd parity
    std::vector<double> predicted;   // gamma_* delta_*(h)
    double r2 = 0.0;                 // against the predicted curve
    struct Minimum {
        double h = 0.0;
        double value = 0.0;
        double h_zero = std::numeric_limits<double>::quiet_NaN();  // nearest predicted zero
        double rel_offset = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Minimum> minima;
    std::vector<InterferenceZero> zeros;
};

// Samples eps = mu h^{m*/(m*+1)} on h_points values of h spaced evenly in 1/h over [h_lo, h_hi].
[[nodiscard]] InterferenceScan scan_interference(const SweepConfig& c);

struct SwitchRow {
    double alpha = 0.0;
    double eps = 0.0;
    double h = 0.0;
    std::string tag;
    bool forbidden = false;
    int n_odd_adiabatic = 0;
    int parity = 0;
    double p_numeric = std::numeric_limits<double>::quiet_NaN();
    std::string branch;  // near0, near1, middle, or skipped
    bool classification_ok = false;
    std::string effective_sign;  // sign of V~ right of t_1, on each gap, and left of t_n
};

struct SwitchReport {
    std::vector<SwitchRow> rows;
    std::size_t forbidden = 0;
    std::size_t misclassified = 0;
    bool parity_flips = false;
};

// Walks the config path. Forbidden rows are flagged and skipped; throws PathCrossesForbiddenBand
// if every row is forbidden.
[[nodiscard]] SwitchReport regime_switch_demo(const SweepConfig& c);

struct DecayFit {
    RateFit fit;            // log|beta| against mu^{(m+1)/m}; the slope estimates -a
    double a_turning = 0.0;  // turning-point value at the median eps
    double rel_error = 0.0;
    std::vector<double> mu;
    std::vector<double> p_numeric;
};

// Single crossing model; |beta| = sqrt(P) divided by the predicted interference factor for m > 1.
// Points with interference factor below 0.3 are dropped.
[[nodiscard]] DecayFit adiabatic_decay_fit(const PotentialModel& model, double h, const std::vector<double>& mu,
                                           const PropagatorOptions& prop = {}, int jobs = 0);

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
};

// Property suites: propagator, msa, stationary_phase, su2, jost.
[[nodiscard]] std::vector<CheckResult> run_verify(std::uint64_t seed, const std::string& only = "");

void write_rows_csv(std::ostream& os, const std::vector<Row>& rows);
[[nodiscard]] json rows_to_json(const std::vector<Row>& rows);
// {schema, version, config_hash, config, wall_seconds, ...extra}.
[[nodiscard]] json report_metadata(const SweepConfig& c, double wall_seconds);

[[nodiscard]] std::string version_string();

}  // namespace crosslab
