#include "crosslab/config.hpp"
#include "crosslab/error.hpp"
#include "crosslab/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace crosslab;

namespace {

json lz_config() {
    return {{"potential", {{"family", "polynomial_windowed"}, {"coeffs", {0.0, 1.0}}, {"window", 8.0}, {"ramp", 2.0}}},
            {"crossing_window", {-10.0, 10.0}},
            {"grid", {{"type", "product"}, {"eps", {0.1, 0.2}}, {"h", {0.1, 0.2}}}},
            {"oracles", {"numeric"}},
            {"propagator", {{"tol", 1e-11}}}};
}

}  // namespace

TEST_CASE("config validation") {
    json c = lz_config();
    c["grid"]["h"] = {0.1, 0.1};
    CHECK_THROWS_AS((void)sweep_config_from_json(c), Error);
    c = lz_config();
    c.erase("potential");
    CHECK_THROWS_AS((void)sweep_config_from_json(c), Error);
    c = lz_config();
    c["potential"]["family"] = "gaussian";
    CHECK_THROWS_AS((void)sweep_config_from_json(c), Error);
    c = lz_config();
    c["grid"]["type"] = "spiral";
    CHECK_THROWS_AS((void)sweep_config_from_json(c), Error);
    try {
        (void)sweep_config_from_json(json{{"grid", {{"type", "product"}}}});
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("potential round trip through json") {
    const PotentialModel p = PotentialModel::scaled_tanh_product(1.5, {{3, 1.0, 2.0}, {1, 4.0, -1.0}});
    const PotentialModel q = potential_from_json(potential_to_json(p));
    for (double t : {-3.0, -0.2, 0.0, 1.7, 4.0}) CHECK(q.eval(t) == p.eval(t));
    CHECK(potential_to_json(q) == potential_to_json(p));
}

TEST_CASE("ladders and grids") {
    CHECK(ladder_from_json(json{{"geom", {1e-3, 1e-1, 3}}}) == std::vector<double>{1e-3, 1e-2, 1e-1});
    CHECK(ladder_from_json(json(0.5)) == std::vector<double>{0.5});
    GridSpec g;
    g.type = GridType::MuLadder;
    g.m = 3;
    g.mu = {0.05, 0.1};
    g.h = {1e-3, 1e-2};
    const auto pts = grid_points(g);
    REQUIRE(pts.size() == 4);
    for (const auto& [eps, h] : pts) {
        const double mu = eps * std::pow(h, -0.75);
        CHECK((std::abs(mu - 0.05) < 1e-12 || std::abs(mu - 0.1) < 1e-12));
    }
    g.type = GridType::PowerPath;
    g.c = 2.0;
    g.alpha = {0.5, 1.0};
    g.h = {1e-4};
    const auto pp = grid_points(g);
    REQUIRE(pp.size() == 2);
    CHECK(pp[0].first == doctest::Approx(2e-2));
    CHECK(pp[1].first == doctest::Approx(2e-4));
}

TEST_CASE("config hash is stable and sensitive") {
    const json a = sweep_config_to_json(sweep_config_from_json(lz_config()));
    const json b = sweep_config_to_json(sweep_config_from_json(lz_config()));
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    json c = lz_config();
    c["grid"]["h"] = {0.1, 0.3};
    CHECK(config_hash(sweep_config_to_json(sweep_config_from_json(c))) != config_hash(a));
}

TEST_CASE("rate fits") {
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < 8; ++i) {
        x.push_back(std::ldexp(1.0, -i));
        y.push_back(3.0 * x.back() * x.back());
    }
    const RateFit f = fit_loglog(x, y);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-6));
    CHECK(f.r2 > 0.999999);
    CHECK(f.used == 8);
    // Points at the noise floor are excluded.
    const RateFit g = fit_loglog(x, y, 3.0 * std::ldexp(1.0, -10) / 100.0);
    CHECK(g.excluded == 3);
    CHECK(g.slope == doctest::Approx(2.0).epsilon(1e-6));
    try {
        (void)fit_loglog({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
}

TEST_CASE("empty grid gives an empty table") {
    json c = lz_config();
    c["grid"]["eps"] = json::array();
    CHECK(run_sweep(sweep_config_from_json(c)).empty());
}

TEST_CASE("Landau-Zener sweep, serial and parallel") {
    SweepConfig c = sweep_config_from_json(lz_config());
    c.jobs = 1;
    const std::vector<Row> serial = run_sweep(c);
    c.jobs = 4;
    const std::vector<Row> par = run_sweep(c);
    std::ostringstream a;
    std::ostringstream b;
    write_rows_csv(a, serial);
    write_rows_csv(b, par);
    CHECK(a.str() == b.str());
    REQUIRE(serial.size() == 4);
    for (const Row& r : serial) {
        CHECK(r.status == "OK");
        CHECK(std::abs(r.p_numeric - std::exp(-std::numbers::pi * r.eps * r.eps / r.h)) < 1e-5);
        CHECK(r.unitarity_defect < 1e-8);
    }
    CHECK(a.str().rfind("row,eps,h,", 0) == 0);
    const json j = rows_to_json(serial);
    CHECK(j.size() == 4);
}

TEST_CASE("forbidden rows are skipped for predictive oracles") {
    json c = {{"potential", {{"family", "tanh_product"}, {"c", 1.0}, {"factors", {{{"power", 3}}}}}},
              {"crossing_window", {-10.0, 10.0}},
              {"grid", {{"type", "mu_ladder"}, {"m", 3}, {"mu", {0.05, 1.0}}, {"h", {0.01}}}},
              {"oracles", {"numeric", "chain"}}};
    const std::vector<Row> rows = run_sweep(sweep_config_from_json(c));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "OK");
    CHECK(rows[0].regime_tag == "N");
    CHECK(std::isfinite(rows[0].p_chain));
    CHECK(rows[1].status == "SKIPPED_REGIME");
    CHECK(rows[1].regime_tag == "-");
    CHECK(std::isfinite(rows[1].p_numeric));
    CHECK(std::isnan(rows[1].p_chain));
}

TEST_CASE("interference scan needs two crossings") {
    json c = {{"potential", {{"family", "tanh_product"}, {"c", 1.0}, {"factors", {{{"power", 3}}}}}},
              {"crossing_window", {-10.0, 10.0}},
              {"grid", {{"type", "mu_ladder"}, {"m", 3}, {"mu", {0.05}}}},
              {"scan", {{"h_lo", 0.01}, {"h_hi", 0.02}, {"points", 9}}}};
    try {
        (void)scan_interference(sweep_config_from_json(c));
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoMinimaFound);
    }
}

TEST_CASE("switch demo with every crossing flat keeps the base parity") {
    json c = {{"potential", {{"family", "tanh_product"}, {"c", 1.0}, {"factors", {{{"power", 3}, {"shift", 2.0}}, {{"power", 3}, {"shift", -2.0}}}}}},
              {"crossing_window", {-10.0, 10.0}},
              {"grid", {{"type", "power_path"}, {"c", 1.0}, {"alpha", {1.3, 1.4}}, {"h", {1e-2}}}}};
    const SweepConfig sc = sweep_config_from_json(c);
    const SweepSetup s = make_setup(sc);
    const SwitchReport rep = regime_switch_demo(sc);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.misclassified == 0);
    CHECK_FALSE(rep.parity_flips);
    for (const SwitchRow& r : rep.rows) {
        CHECK(r.tag == "NN");
        CHECK(r.parity == s.cat.sigma_n() % 2);
        CHECK(r.n_odd_adiabatic == 0);
    }
}

TEST_CASE("parallel_for rethrows") {
    CHECK_THROWS_AS(parallel_for(16, 4, [](std::size_t i) {
                        if (i == 7) throw Error(ErrorCode::ConfigError, "x");
                    }),
                    Error);
}
