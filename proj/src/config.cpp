#include "crosslab/config.hpp"
#include "crosslab/error.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace crosslab {

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::ConfigError, what);
}

void check_monotone(const std::vector<double>& v, const std::string& name) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        require(v[i] > v[i - 1] || v[i] < v[i - 1], name + " ladder has repeated values");
        if (i >= 2) {
            require((v[i] > v[i - 1]) == (v[i - 1] > v[i - 2]), name + " ladder is not strictly monotone");
        }
    }
}

GridType grid_type_from_string(const std::string& s) {
    if (s == "product") return GridType::Product;
    if (s == "mu_ladder") return GridType::MuLadder;
    if (s == "power_path") return GridType::PowerPath;
    if (s == "log_path") return GridType::LogPath;
    throw Error(ErrorCode::ConfigError, "unknown grid type '" + s + "'");
}

std::string to_string(GridType t) {
    switch (t) {
        case GridType::Product: return "product";
        case GridType::MuLadder: return "mu_ladder";
        case GridType::PowerPath: return "power_path";
        case GridType::LogPath: return "log_path";
    }
    return "product";
}

}  // namespace

PotentialModel potential_from_json(const json& j) {
    try {
        const std::string fam = j.at("family").get<std::string>();
        if (fam == "tanh_product") {
            std::vector<TanhFactor> fs;
            for (const json& f : j.at("factors")) {
                fs.push_back({get_or<int>(f, "power", 1), get_or<double>(f, "scale", 1.0),
                              get_or<double>(f, "shift", 0.0)});
            }
            return PotentialModel::scaled_tanh_product(get_or<double>(j, "c", 1.0), std::move(fs));
        }
        if (fam == "polynomial_windowed") {
            return PotentialModel::polynomial_windowed(j.at("coeffs").get<std::vector<double>>(),
                                                       j.at("window").get<double>(), get_or<double>(j, "ramp", 1.0));
        }
        if (fam == "linear_lz") return PotentialModel::linear_lz(get_or<double>(j, "v", 1.0));
        throw Error(ErrorCode::ConfigError, "unknown potential family '" + fam + "'");
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("potential: ") + e.what());
    }
}

json potential_to_json(const PotentialModel& m) {
    json j;
    switch (m.family()) {
        case Family::ScaledTanhProduct: {
            j["family"] = "tanh_product";
            j["c"] = m.c();
            j["factors"] = json::array();
            for (const auto& f : m.factors()) {
                j["factors"].push_back({{"power", f.power}, {"scale", f.scale}, {"shift", f.shift}});
            }
            break;
        }
        case Family::PolynomialWindowed:
            j["family"] = "polynomial_windowed";
            j["coeffs"] = m.coeffs();
            j["window"] = m.window();
            j["ramp"] = m.ramp();
            break;
        case Family::LinearLZ:
            j["family"] = "linear_lz";
            j["v"] = m.c();
            break;
    }
    return j;
}

std::vector<double> ladder_from_json(const json& j) {
    try {
        if (j.is_array()) return j.get<std::vector<double>>();
        if (j.is_number()) return {j.get<double>()};
        if (j.contains("geom") || j.contains("lin")) {
            const bool geom = j.contains("geom");
            const auto p = j.at(geom ? "geom" : "lin").get<std::vector<double>>();
            require(p.size() == 3, "ladder needs [lo, hi, n]");
            const auto n = static_cast<std::size_t>(p[2]);
            require(n >= 1, "ladder needs at least one point");
            if (geom) require(p[0] > 0.0 && p[1] > 0.0, "geometric ladder needs positive ends");
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double s = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
                v[i] = geom ? p[0] * std::pow(p[1] / p[0], s) : p[0] + (p[1] - p[0]) * s;
            }
            return v;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("ladder: ") + e.what());
    }
    throw Error(ErrorCode::ConfigError, "ladder must be an array, a number, or {geom|lin: [lo, hi, n]}");
}

std::vector<std::pair<double, double>> grid_points(const GridSpec& g) {
    std::vector<std::pair<double, double>> pts;
    switch (g.type) {
        case GridType::Product:
            for (double e : g.eps) {
                for (double h : g.h) pts.emplace_back(e, h);
            }
            break;
        case GridType::MuLadder:
            for (double mu : g.mu) {
                for (double h : g.h) pts.emplace_back(mu * std::pow(h, g.m / (g.m + 1.0)), h);
            }
            break;
        case GridType::PowerPath:
            for (double a : g.alpha) {
                for (double h : g.h) pts.emplace_back(g.c * std::pow(h, a), h);
            }
            break;
        case GridType::LogPath:
            for (double h : g.h) {
                pts.emplace_back(std::pow(h * std::log(1.0 / std::pow(h, g.rho)), g.m / (g.m + 1.0)), h);
            }
            break;
    }
    return pts;
}

SweepConfig sweep_config_from_json(const json& j) {
    SweepConfig c;
    try {
        require(j.contains("potential"), "config needs a potential");
        c.potential = j.at("potential");
        (void)potential_from_json(c.potential);
        if (j.contains("crossing_window")) {
            const auto w = j.at("crossing_window").get<std::vector<double>>();
            require(w.size() == 2 && w[0] < w[1], "crossing_window must be [lo, hi]");
            c.window_lo = w[0];
            c.window_hi = w[1];
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            c.grid.type = grid_type_from_string(get_or<std::string>(g, "type", "product"));
            if (g.contains("eps")) c.grid.eps = ladder_from_json(g.at("eps"));
            if (g.contains("h")) c.grid.h = ladder_from_json(g.at("h"));
            if (g.contains("mu")) c.grid.mu = ladder_from_json(g.at("mu"));
            if (g.contains("alpha")) c.grid.alpha = ladder_from_json(g.at("alpha"));
            c.grid.m = get_or<int>(g, "m", 1);
            c.grid.c = get_or<double>(g, "c", 1.0);
            c.grid.rho = get_or<double>(g, "rho", 1.0);
            check_monotone(c.grid.eps, "eps");
            check_monotone(c.grid.h, "h");
            check_monotone(c.grid.mu, "mu");
            check_monotone(c.grid.alpha, "alpha");
            for (double h : c.grid.h) require(h > 0.0, "h must be positive");
            for (double e : c.grid.eps) require(e >= 0.0, "eps must be non-negative");
        }
        if (j.contains("oracles")) {
            c.oracles = {};
            c.oracles.numeric = false;
            for (const auto& o : j.at("oracles")) {
                const std::string s = o.get<std::string>();
                if (s == "numeric") {
                    c.oracles.numeric = true;
                } else if (s == "theorem1") {
                    c.oracles.theorem1 = true;
                } else if (s == "theorem2") {
                    c.oracles.theorem2 = true;
                } else if (s == "chain") {
                    c.oracles.chain = true;
                } else {
                    throw Error(ErrorCode::ConfigError, "unknown oracle '" + s + "'");
                }
            }
        }
        if (j.contains("regime")) {
            const json& r = j.at("regime");
            c.regime.mode = band_mode_from_string(get_or<std::string>(r, "mode", "mu"));
            c.regime.flat_max = get_or<double>(r, "flat_max", c.regime.flat_max);
            c.regime.sharp_min = get_or<double>(r, "sharp_min", c.regime.sharp_min);
            c.regime.prob_max = get_or<double>(r, "prob_max", c.regime.prob_max);
        }
        if (j.contains("propagator")) {
            const json& p = j.at("propagator");
            c.prop.stepper = stepper_from_string(get_or<std::string>(p, "stepper", "rkf78"));
            c.prop.tol = get_or<double>(p, "tol", c.prop.tol);
        }
        c.theta = theta_from_string(get_or<std::string>(j, "theta", "theorem"));
        c.jobs = get_or<int>(j, "jobs", 0);
        c.out_dir = get_or<std::string>(j, "out", ".");
        if (j.contains("scan")) {
            const json& s = j.at("scan");
            c.h_lo = s.at("h_lo").get<double>();
            c.h_hi = s.at("h_hi").get<double>();
            c.h_points = s.at("points").get<std::size_t>();
            require(c.h_lo > 0.0 && c.h_hi > c.h_lo, "scan needs 0 < h_lo < h_hi");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    if (const char* v = std::getenv("CROSSLAB_JOBS")) c.jobs = std::atoi(v);
    if (const char* v = std::getenv("CROSSLAB_TOL")) c.prop.tol = std::atof(v);
    if (const char* v = std::getenv("CROSSLAB_OUT")) c.out_dir = v;
    if (const char* v = std::getenv("CROSSLAB_STEPPER")) c.prop.stepper = stepper_from_string(v);
    require(c.prop.tol > 0.0, "tolerance must be positive");
    return c;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, "config '" + path + "': " + e.what());
    }
    return sweep_config_from_json(j);
}

json sweep_config_to_json(const SweepConfig& c) {
    json j;
    j["potential"] = c.potential;
    j["crossing_window"] = {c.window_lo, c.window_hi};
    j["grid"] = {{"type", to_string(c.grid.type)}, {"eps", c.grid.eps}, {"h", c.grid.h}, {"mu", c.grid.mu},
                 {"alpha", c.grid.alpha}, {"m", c.grid.m}, {"c", c.grid.c}, {"rho", c.grid.rho}};
    json o = json::array();
    if (c.oracles.numeric) o.push_back("numeric");
    if (c.oracles.theorem1) o.push_back("theorem1");
    if (c.oracles.theorem2) o.push_back("theorem2");
    if (c.oracles.chain) o.push_back("chain");
    j["oracles"] = o;
    j["regime"] = {{"mode", to_string(c.regime.mode)},
                   {"flat_max", c.regime.flat_max},
                   {"sharp_min", c.regime.sharp_min},
                   {"prob_max", c.regime.prob_max}};
    j["propagator"] = {{"stepper", to_string(c.prop.stepper)}, {"tol", c.prop.tol}};
    j["theta"] = to_string(c.theta);
    if (c.h_points > 0) j["scan"] = {{"h_lo", c.h_lo}, {"h_hi", c.h_hi}, {"points", c.h_points}};
    return j;
}

std::string config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace crosslab
