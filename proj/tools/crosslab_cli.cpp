#include "crosslab/config.hpp"
#include "crosslab/error.hpp"
#include "crosslab/harness.hpp"
#include "crosslab/predictor.hpp"
#include "crosslab/scattering.hpp"
#include "crosslab/transfer.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

namespace {

using namespace crosslab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitAcceptance = 4;

struct Flags {
    std::string config;
    std::string out;
    int jobs = -1;
    double tol = 0.0;
    std::uint64_t seed = 42;
    double eps = std::numeric_limits<double>::quiet_NaN();
    double h = std::numeric_limits<double>::quiet_NaN();
    std::string suite;
};

SweepConfig load(const Flags& f) {
    if (f.config.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
    SweepConfig c = load_config(f.config);
    if (f.jobs >= 0) c.jobs = f.jobs;
    if (f.tol > 0.0) c.prop.tol = f.tol;
    if (!f.out.empty()) c.out_dir = f.out;
    return c;
}

std::pair<double, double> single_point(const Flags& f, const SweepConfig& c) {
    if (!std::isnan(f.eps) && !std::isnan(f.h)) return {f.eps, f.h};
    const auto pts = grid_points(c.grid);
    if (pts.empty()) throw Error(ErrorCode::ConfigError, "give --eps and --h or a non-empty grid");
    return pts.front();
}

std::ofstream open_out(const SweepConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.out_dir);
    const auto path = std::filesystem::path(c.out_dir) / name;
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    return os;
}

json catalog_json(const PotentialModel& model, const CrossingCatalog& cat) {
    json xs = json::array();
    for (std::size_t k = 0; k < cat.size(); ++k) {
        const Crossing& x = cat.crossings[k];
        xs.push_back({{"t", x.t}, {"m", x.m}, {"v", x.v}, {"sigma", cat.sigma[k]},
                      {"a_local", local_decay_constant(x.m, x.v)}});
    }
    return {{"potential", potential_to_json(model)},
            {"family", to_string(model.family())},
            {"v_left", model.v_left()},
            {"v_right", model.v_right()},
            {"crossings", xs},
            {"m_star", cat.m_star},
            {"lambda_star", cat.lambda_star},
            {"sigma_n", cat.sigma_n()}};
}

int cmd_describe(const Flags& f) {
    const SweepConfig c = load(f);
    const SweepSetup s = make_setup(c);
    json j = catalog_json(s.model, s.cat);
    RegimeThresholds thr = c.regime;
    thr.enforce = false;
    json map = json::array();
    for (const auto& [eps, h] : grid_points(c.grid)) {
        std::string tag;
        for (const Crossing& x : s.cat.crossings) {
            const auto r = classify_crossing(x, eps, h, thr);
            tag += !r ? '-' : (*r == Regime::Adiabatic ? 'A' : 'N');
        }
        map.push_back({{"epsilon", eps}, {"h", h}, {"regime_tag", tag}});
    }
    j["regime_map"] = map;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_simulate(const Flags& f) {
    const SweepConfig c = load(f);
    const PotentialModel model = potential_from_json(c.potential);
    const auto [eps, h] = single_point(f, c);
    ScatteringOptions so;
    so.prop = c.prop;
    const ScatteringReport r = scattering_matrix(model, eps, h, so);
    const auto cj = [](cplx z) { return json::array({z.real(), z.imag()}); };
    const json j = {{"epsilon", eps},
                    {"h", h},
                    {"P_numeric", r.p},
                    {"S", {cj(r.s.a), cj(r.s.b), cj(r.s.c), cj(r.s.d)}},
                    {"t_left", r.t_left},
                    {"t_right", r.t_right},
                    {"unitarity_defect", r.unitarity_defect},
                    {"steps", r.stats.steps},
                    {"rejected", r.stats.rejected},
                    {"adiabatic_ends", r.adiabatic_ends},
                    {"stepper", to_string(c.prop.stepper)},
                    {"tol", c.prop.tol}};
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_predict(const Flags& f) {
    SweepConfig c = load(f);
    const SweepSetup s = make_setup(c);
    const auto [eps, h] = single_point(f, c);
    c.oracles = {c.oracles.numeric, true, true, true};
    const Row r = evaluate_row(s, c, 0, eps, h);
    const auto num = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
    const auto branch = [&](double p) -> std::string {
        if (std::isnan(p)) return "";
        return p < 0.2 ? "near0" : (p > 0.8 ? "near1" : "middle");
    };
    json preds = json::array();
    const auto add = [&](const char* name, double p, const std::string& order) {
        preds.push_back({{"oracle", name},
                         {"epsilon", eps},
                         {"h", h},
                         {"mu_star", r.mu_star},
                         {"P_pred", num(p)},
                         {"P_numeric", num(r.p_numeric)},
                         {"branch", branch(p)},
                         {"error_order", order}});
    };
    add("theorem1", r.p_theorem1, "mu*^2 (mu* + h^(1/(m*(m*+1))))");
    add("theorem2", r.p_theorem2, "leading term L");
    add("chain", r.p_chain, "factor error orders");
    const json j = {{"regime_tag", r.regime_tag}, {"parity", r.parity}, {"status", r.status},
                    {"errors", r.error}, {"predictions", preds}};
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_verify(const Flags& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_verify(f.seed, f.suite);
    bool ok = true;
    for (const CheckResult& r : res) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << ": " << r.name << " value=" << r.value
                  << " threshold=" << r.threshold << '\n';
        ok = ok && r.passed;
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (ok ? "verify PASS" : "verify FAIL") << " seed=" << f.seed << " wall=" << dt << "s\n";
    return ok ? kExitOk : kExitAcceptance;
}

int cmd_sweep(const Flags& f) {
    const SweepConfig c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Row> rows = run_sweep(c);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        auto os = open_out(c, "rows.csv");
        write_rows_csv(os, rows);
    }
    json rep = report_metadata(c, dt);
    rep["rows"] = rows_to_json(rows);
    open_out(c, "report.json") << rep.dump(2) << '\n';
    std::size_t errors = 0;
    for (const Row& r : rows) errors += r.status.rfind("ERROR", 0) == 0 ? 1 : 0;
    std::cout << rows.size() << " rows, " << errors << " errors, " << dt << " s -> " << c.out_dir << '\n';
    return errors == 0 ? kExitOk : kExitNumeric;
}

int cmd_interfere(const Flags& f) {
    const SweepConfig c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    const InterferenceScan s = scan_interference(c);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        auto os = open_out(c, "interference.csv");
        os << "h,series,value\n";
        os.precision(17);
        for (std::size_t i = 0; i < s.h.size(); ++i) {
            os << s.h[i] << ",numeric," << s.normalized[i] << '\n';
            os << s.h[i] << ",predicted," << s.predicted[i] << '\n';
        }
    }
    json minima = json::array();
    for (const auto& m : s.minima) {
        minima.push_back({{"h", m.h}, {"value", m.value}, {"h_zero", std::isnan(m.h_zero) ? json(nullptr) : json(m.h_zero)},
                          {"rel_offset", std::isnan(m.rel_offset) ? json(nullptr) : json(m.rel_offset)}});
    }
    json zeros = json::array();
    for (const auto& z : s.zeros) zeros.push_back({{"h", z.h}, {"delta", z.delta}, {"exact", z.exact}, {"k", z.k}});
    json rep = report_metadata(c, dt);
    rep["mu"] = s.mu;
    rep["r2"] = s.r2;
    rep["minima"] = minima;
    rep["predicted_zeros"] = zeros;
    open_out(c, "interference.json") << rep.dump(2) << '\n';
    std::cout << rep.dump(2) << '\n';
    return kExitOk;
}

int cmd_switch(const Flags& f) {
    const SweepConfig c = load(f);
    const auto t0 = std::chrono::steady_clock::now();
    const SwitchReport s = regime_switch_demo(c);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        auto os = open_out(c, "switch.csv");
        os << "alpha,eps,h,regime_tag,forbidden,n_odd_adiabatic,parity,P_numeric,branch,classification_ok,"
              "effective_sign\n";
        os.precision(17);
        for (const SwitchRow& r : s.rows) {
            os << r.alpha << ',' << r.eps << ',' << r.h << ',' << r.tag << ',' << r.forbidden << ','
               << r.n_odd_adiabatic << ',' << r.parity << ',';
            if (!std::isnan(r.p_numeric)) os << r.p_numeric;
            os << ',' << r.branch << ',' << r.classification_ok << ',' << r.effective_sign << '\n';
        }
    }
    json rep = report_metadata(c, dt);
    rep["forbidden"] = s.forbidden;
    rep["misclassified"] = s.misclassified;
    rep["parity_flips"] = s.parity_flips;
    open_out(c, "switch.json") << rep.dump(2) << '\n';
    std::cout << s.rows.size() << " rows, " << s.forbidden << " forbidden, " << s.misclassified
              << " misclassified\n";
    return s.misclassified == 0 ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level avoided-crossing experiments"};
    app.require_subcommand(1);
    // -h is taken by the semiclassical parameter.
    app.set_help_flag("--help", "print this help message and exit");
    Flags f;
    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON config")->envname("CROSSLAB_CONFIG");
        sub->add_option("--out", f.out, "output directory");
        sub->add_option("--jobs", f.jobs, "worker threads (0: all cores)");
        sub->add_option("--tol", f.tol, "propagator tolerance");
    };
    auto* describe = app.add_subcommand("describe", "crossing catalog and regime map");
    common(describe);
    auto* simulate = app.add_subcommand("simulate", "numeric transition probability at one point");
    common(simulate);
    auto* predict = app.add_subcommand("predict", "theorem and chain predictions at one point");
    common(predict);
    for (auto* sub : {simulate, predict}) {
        sub->add_option("--eps", f.eps, "coupling");
        sub->add_option("--h", f.h, "semiclassical parameter");
    }
    auto* verify = app.add_subcommand("verify", "property suites");
    verify->add_option("--seed", f.seed, "seed for randomized inputs")->envname("CROSSLAB_SEED");
    verify->add_option("--suite", f.suite, "propagator, msa, stationary_phase, su2 or jost");
    auto* sweep = app.add_subcommand("sweep", "grid sweep to CSV");
    common(sweep);
    auto* interfere = app.add_subcommand("interfere", "interference minima scan");
    common(interfere);
    auto* sw = app.add_subcommand("switch-demo", "regime switch along a path");
    common(sw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    try {
        if (*describe) return cmd_describe(f);
        if (*simulate) return cmd_simulate(f);
        if (*predict) return cmd_predict(f);
        if (*verify) return cmd_verify(f);
        if (*sweep) return cmd_sweep(f);
        if (*interfere) return cmd_interfere(f);
        if (*sw) return cmd_switch(f);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}
