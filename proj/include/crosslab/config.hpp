#pragma once

#include "crosslab/potential.hpp"
#include "crosslab/predictor.hpp"
#include "crosslab/propagator.hpp"
#include "crosslab/transfer.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace crosslab {

using json = nlohmann::json;

// {"family": "tanh_product", "c": 1, "factors": [{"power": 3, "scale": 1, "shift": 0}]}
// {"family": "polynomial_windowed", "coeffs": [0, 1], "window": 8, "ramp": 2}
// {"family": "linear_lz", "v": 1}
[[nodiscard]] PotentialModel potential_from_json(const json& j);
[[nodiscard]] json potential_to_json(const PotentialModel& m);

// Ladders are arrays or {"geom": [lo, hi, n]} / {"lin": [lo, hi, n]}.
[[nodiscard]] std::vector<double> ladder_from_json(const json& j);

enum class GridType {
    Product,    // eps x h
    MuLadder,   // eps = mu h^{m/(m+1)} for each (mu, h)
    PowerPath,  // eps = c h^alpha for each (alpha, h)
    LogPath,    // eps = (h log(1/h^rho))^{m/(m+1)}
};

struct GridSpec {
    GridType type = GridType::Product;
    std::vector<double> eps;
    std::vector<double> h;
    std::vector<double> mu;
    std::vector<double> alpha;
    int m = 1;
    double c = 1.0;
    double rho = 1.0;
};

// (eps, h) pairs in a fixed order: outer loop over the first listed axis.
[[nodiscard]] std::vector<std::pair<double, double>> grid_points(const GridSpec& g);

struct Oracles {
    bool numeric = true;
    bool theorem1 = false;
    bool theorem2 = false;
    bool chain = false;
};

struct SweepConfig {
    json potential;
    double window_lo = -50.0;  // crossing search window
    double window_hi = 50.0;
    GridSpec grid;
    Oracles oracles;
    RegimeThresholds regime;
    PropagatorOptions prop;
    ThetaConvention theta = ThetaConvention::Theorem;
    int jobs = 0;  // 0: hardware concurrency
    std::string out_dir = ".";
    // Interference and switch scans.
    double h_lo = 0.0;
    double h_hi = 0.0;
    std::size_t h_points = 0;
};

// Parses a config and applies CROSSLAB_JOBS, CROSSLAB_TOL, CROSSLAB_OUT and CROSSLAB_STEPPER.
[[nodiscard]] SweepConfig sweep_config_from_json(const json& j);
[[nodiscard]] SweepConfig load_config(const std::string& path);
[[nodiscard]] json sweep_config_to_json(const SweepConfig& c);

// FNV-1a of the canonical JSON dump.
[[nodiscard]] std::string config_hash(const json& j);

}  // namespace crosslab
