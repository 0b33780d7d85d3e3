#include "crosslab/harness.hpp"
#include "crosslab/error.hpp"
#include "crosslab/scattering.hpp"

#include <boost/math/statistics/linear_regression.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef CROSSLAB_VERSION
#define CROSSLAB_VERSION "0.0.0"
#endif

namespace crosslab {

namespace {

std::string error_label(const std::exception& e) {
    if (const auto* ce = dynamic_cast<const Error*>(&e)) return std::string(to_string(ce->code()));
    return "Exception";
}

void append_error(std::string& s, const std::string& oracle, const std::exception& e) {
    if (!s.empty()) s += ';';
    s += oracle + ':' + error_label(e);
}

RegimeThresholds non_enforcing(const RegimeThresholds& t) {
    RegimeThresholds r = t;
    r.enforce = false;
    return r;
}

struct Classified {
    std::vector<Regime> regime;
    std::string tag;
    bool forbidden = false;
    int n_odd_adiabatic = 0;
};

Classified classify_all(const CrossingCatalog& cat, double eps, double h, const RegimeThresholds& thr) {
    Classified c;
    for (const Crossing& x : cat.crossings) {
        const auto r = classify_crossing(x, eps, h, thr);
        if (!r) {
            c.forbidden = true;
            c.tag += '-';
            c.regime.push_back(Regime::NonAdiabatic);
            continue;
        }
        c.regime.push_back(*r);
        c.tag += *r == Regime::Adiabatic ? 'A' : 'N';
        if (*r == Regime::Adiabatic && x.m % 2 == 1) ++c.n_odd_adiabatic;
    }
    return c;
}

std::pair<double, double> crossing_window(const PotentialModel& model) {
    if (!model.has_finite_tails()) return {-50.0, 50.0};
    return {model.tail_anchor(Side::Left, 1e-10), model.tail_anchor(Side::Right, 1e-10)};
}

std::string fmt(double x) {
    if (std::isnan(x)) return "";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

SweepSetup make_setup(const SweepConfig& c) {
    PotentialModel m = potential_from_json(c.potential);
    CrossingCatalog cat = find_crossings(m, c.window_lo, c.window_hi);
    return {std::move(m), std::move(cat)};
}

Row evaluate_row(const SweepSetup& s, const SweepConfig& c, std::size_t index, double eps, double h) {
    Row r;
    r.row = index;
    r.eps = eps;
    r.h = h;
    r.m_star = s.cat.m_star;
    r.mu_star = s.cat.size() > 0 ? mu_m(eps, h, s.cat.m_star) : 0.0;
    const RegimeThresholds thr = non_enforcing(c.regime);
    const Classified cl = classify_all(s.cat, eps, h, thr);
    r.regime_tag = cl.tag;
    r.parity = (s.cat.sigma_n() + cl.n_odd_adiabatic) % 2;
    const bool predictive = c.oracles.theorem1 || c.oracles.theorem2 || c.oracles.chain;
    if (cl.forbidden && predictive) r.status = "SKIPPED_REGIME";

    if (c.oracles.numeric) {
        try {
            ScatteringOptions so;
            so.prop = c.prop;
            const ScatteringReport sr = scattering_matrix(s.model, eps, h, so);
            r.p_numeric = sr.p;
            r.unitarity_defect = sr.unitarity_defect;
            r.steps = sr.stats.steps;
        } catch (const std::exception& e) {
            r.status = "ERROR:" + error_label(e);
            append_error(r.error, "numeric", e);
        }
    }
    if (cl.forbidden) return r;

    const bool all_flat =
        std::all_of(cl.regime.begin(), cl.regime.end(), [](Regime g) { return g == Regime::NonAdiabatic; });
    if (c.oracles.theorem1) {
        try {
            if (!all_flat) throw Error(ErrorCode::RegimeViolation, "adiabatic crossing present");
            Theorem1Options o;
            o.theta = c.theta;
            o.enforce_regime = false;
            r.p_theorem1 = theorem1_P(s.model, s.cat, eps, h, o).p_pred;
        } catch (const std::exception& e) {
            append_error(r.error, "theorem1", e);
        }
    }
    if (c.oracles.theorem2) {
        try {
            r.p_theorem2 = theorem2_L(s.model, s.cat, eps, h, cl.regime, thr).p_pred;
        } catch (const std::exception& e) {
            append_error(r.error, "theorem2", e);
        }
    }
    if (c.oracles.chain) {
        try {
            r.p_chain = predicted_scattering(s.model, s.cat, eps, h, cl.regime, thr).p;
        } catch (const std::exception& e) {
            append_error(r.error, "chain", e);
        }
    }
    return r;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
    if (n == 0) return;
    std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

std::vector<Row> run_sweep(const SweepSetup& s, const SweepConfig& c,
                           const std::vector<std::pair<double, double>>& points) {
    std::vector<Row> rows(points.size());
    parallel_for(points.size(), c.jobs, [&](std::size_t i) {
        rows[i] = evaluate_row(s, c, i, points[i].first, points[i].second);
    });
    return rows;
}

std::vector<Row> run_sweep(const SweepConfig& c) {
    const SweepSetup s = make_setup(c);
    return run_sweep(s, c, grid_points(c.grid));
}

RateFit fit_linear(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_points) {
    std::vector<double> xs;
    std::vector<double> ys;
    RateFit f;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            xs.push_back(x[i]);
            ys.push_back(y[i]);
        } else {
            ++f.excluded;
        }
    }
    if (xs.size() < std::max<std::size_t>(min_points, 2)) {
        throw Error(ErrorCode::InsufficientData, std::to_string(xs.size()) + " usable points, need " +
                                                     std::to_string(std::max<std::size_t>(min_points, 2)));
    }
    try {
        const auto [c0, c1, r2] = boost::math::statistics::simple_ordinary_least_squares_with_R_squared(xs, ys);
        f.intercept = c0;
        f.slope = c1;
        f.r2 = r2;
    } catch (const std::domain_error& e) {
        throw Error(ErrorCode::InsufficientData, e.what());
    }
    f.used = xs.size();
    f.x_lo = *std::min_element(xs.begin(), xs.end());
    f.x_hi = *std::max_element(xs.begin(), xs.end());
    return f;
}

RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double noise_floor,
                   std::size_t min_points) {
    std::vector<double> lx;
    std::vector<double> ly;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (x[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i]) && y[i] > 100.0 * noise_floor && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        } else {
            ++dropped;
        }
    }
    RateFit f = fit_linear(lx, ly, min_points);
    f.excluded += dropped;
    f.x_lo = std::exp(f.x_lo);
    f.x_hi = std::exp(f.x_hi);
    return f;
}

RateFit fit_rate(const std::vector<Row>& rows, const RowQuantity& quantity, const RowQuantity& axis,
                 double noise_floor, std::size_t min_points) {
    std::vector<double> x;
    std::vector<double> y;
    for (const Row& r : rows) {
        if (r.status != "OK") continue;
        x.push_back(axis(r));
        y.push_back(quantity(r));
    }
    return fit_loglog(x, y, noise_floor, min_points);
}

InterferenceScan scan_interference(const SweepConfig& c) {
    if (c.h_points < 3) throw Error(ErrorCode::ConfigError, "scan needs h_lo, h_hi and at least 3 points");
    const SweepSetup s = make_setup(c);
    if (s.cat.size() == 0) throw Error(ErrorCode::ConfigError, "no crossings in the window");
    InterferenceScan out;
    const int m = s.cat.m_star;
    out.mu = c.grid.mu.empty() ? 0.05 : c.grid.mu.front();
    out.parity = s.cat.sigma_n() % 2;
    const std::size_t n = c.h_points;
    out.h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Even in 1/h, increasing h.
        const double x = 1.0 / c.h_lo + (1.0 / c.h_hi - 1.0 / c.h_lo) * static_cast<double>(i) /
                                            static_cast<double>(n - 1);
        out.h[i] = 1.0 / x;
    }
    out.normalized.assign(n, 0.0);
    out.predicted.assign(n, 0.0);
    const double g = gamma_star(m);
    parallel_for(n, c.jobs, [&](std::size_t i) {
        const double h = out.h[i];
        const double eps = out.mu * std::pow(h, m / (m + 1.0));
        ScatteringOptions so;
        so.prop = c.prop;
        const double p = scattering_matrix(s.model, eps, h, so).p;
        out.normalized[i] = (out.parity == 1 ? 1.0 - p : p) / (out.mu * out.mu);
        out.predicted[i] = g * delta_star(s.model, s.cat, h, c.theta);
    });
    double mean = 0.0;
    for (double y : out.normalized) mean += y;
    mean /= static_cast<double>(n);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss_res += std::pow(out.normalized[i] - out.predicted[i], 2);
        ss_tot += std::pow(out.normalized[i] - mean, 2);
    }
    out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;

    const auto [ymin, ymax] = std::minmax_element(out.normalized.begin(), out.normalized.end());
    const double span = *ymax - *ymin;
    // A flat profile (single crossing) has only numerical-noise minima.
    if (span > 0.05 * std::abs(*ymax)) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double y0 = out.normalized[i - 1];
            const double y1 = out.normalized[i];
            const double y2 = out.normalized[i + 1];
            if (!(y1 < y0 && y1 <= y2) || y1 > *ymin + 0.5 * span) continue;
            // Parabola vertex in x = 1/h through three equally spaced samples.
            const double x1 = 1.0 / out.h[i];
            const double dx = 1.0 / out.h[i + 1] - x1;
            const double den = y0 - 2.0 * y1 + y2;
            const double shift = den > 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
            InterferenceScan::Minimum mn;
            mn.h = 1.0 / (x1 + shift * dx);
            mn.value = y1 - 0.25 * (y0 - y2) * shift;
            out.minima.push_back(mn);
        }
    }
    if (out.minima.empty()) throw Error(ErrorCode::NoMinimaFound, "no interference minima in the scan");
    out.zeros = interference_zeros(s.model, s.cat, c.h_lo, c.h_hi, c.theta);
    for (auto& mn : out.minima) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& z : out.zeros) {
            if (std::abs(z.h - mn.h) < best) {
                best = std::abs(z.h - mn.h);
                mn.h_zero = z.h;
                mn.rel_offset = best / z.h;
            }
        }
    }
    return out;
}

SwitchReport regime_switch_demo(const SweepConfig& c) {
    const SweepSetup s = make_setup(c);
    if (s.cat.size() == 0) throw Error(ErrorCode::ConfigError, "no crossings in the window");
    const RegimeThresholds thr = non_enforcing(c.regime);
    SwitchReport rep;
    std::vector<std::pair<double, double>> pts;
    std::vector<double> alphas;
    if (c.grid.type == GridType::PowerPath) {
        for (double a : c.grid.alpha) {
            for (double h : c.grid.h) {
                pts.emplace_back(c.grid.c * std::pow(h, a), h);
                alphas.push_back(a);
            }
        }
    } else {
        pts = grid_points(c.grid);
        for (const auto& [e, h] : pts) alphas.push_back(std::log(e) / std::log(h));
    }
    rep.rows.resize(pts.size());
    std::vector<Classified> cls(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        SwitchRow& r = rep.rows[i];
        r.alpha = alphas[i];
        r.eps = pts[i].first;
        r.h = pts[i].second;
        cls[i] = classify_all(s.cat, r.eps, r.h, thr);
        r.tag = cls[i].tag;
        r.forbidden = cls[i].forbidden;
        if (r.forbidden) {
            r.branch = "skipped";
            ++rep.forbidden;
            continue;
        }
        const RegimeSplit split = make_split(s.cat, cls[i].regime);
        const EffectivePotential ep(s.cat, split);
        r.n_odd_adiabatic = ep.n_odd_adiabatic();
        r.parity = (s.cat.sigma_n() + r.n_odd_adiabatic) % 2;
        std::vector<double> probes{s.cat.crossings.front().t + 1.0};
        for (std::size_t k = 0; k + 1 < s.cat.size(); ++k) {
            probes.push_back(0.5 * (s.cat.crossings[k].t + s.cat.crossings[k + 1].t));
        }
        probes.push_back(s.cat.crossings.back().t - 1.0);
        for (double t : probes) {
            const double v = s.model.eval(t) * ep.sign(t);
            r.effective_sign += v > 0.0 ? '+' : (v < 0.0 ? '-' : '0');
        }
    }
    if (rep.forbidden == pts.size() && !pts.empty()) {
        throw Error(ErrorCode::PathCrossesForbiddenBand, "every row of the path is in the forbidden band");
    }
    parallel_for(pts.size(), c.jobs, [&](std::size_t i) {
        SwitchRow& r = rep.rows[i];
        if (r.forbidden) return;
        ScatteringOptions so;
        so.prop = c.prop;
        r.p_numeric = scattering_matrix(s.model, r.eps, r.h, so).p;
    });
    int seen = -1;
    for (SwitchRow& r : rep.rows) {
        if (r.forbidden) continue;
        r.branch = r.p_numeric < 0.2 ? "near0" : (r.p_numeric > 0.8 ? "near1" : "middle");
        r.classification_ok = (r.parity == 0 && r.branch == "near0") || (r.parity == 1 && r.branch == "near1");
        if (!r.classification_ok) ++rep.misclassified;
        if (seen >= 0 && seen != r.parity) rep.parity_flips = true;
        seen = r.parity;
    }
    return rep;
}

DecayFit adiabatic_decay_fit(const PotentialModel& model, double h, const std::vector<double>& mu,
                             const PropagatorOptions& prop, int jobs) {
    const auto [lo, hi] = crossing_window(model);
    const CrossingCatalog cat = find_crossings(model, lo, hi);
    if (cat.size() != 1) throw Error(ErrorCode::ConfigError, "decay fit needs exactly one crossing");
    const int m = cat.crossings[0].m;
    DecayFit out;
    out.mu = mu;
    out.p_numeric.assign(mu.size(), 0.0);
    std::vector<double> factor(mu.size(), 1.0);
    RegimeThresholds thr;
    thr.enforce = false;
    parallel_for(mu.size(), jobs, [&](std::size_t i) {
        const double eps = mu[i] * std::pow(h, m / (m + 1.0));
        ScatteringOptions so;
        so.prop = prop;
        out.p_numeric[i] = scattering_matrix(model, eps, h, so).p;
        if (m > 1) {
            const AdiabaticFactor af = t_k_adiabatic(model, cat, 0, eps, h, thr);
            factor[i] = std::abs(af.beta) / af.beta_envelope;
        }
    });
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (factor[i] < 0.3 || !(out.p_numeric[i] > 0.0)) continue;
        x.push_back(std::pow(mu[i], (m + 1.0) / m));
        y.push_back(std::log(std::sqrt(out.p_numeric[i]) / factor[i]));
    }
    out.fit = fit_linear(x, y, 3);
    std::vector<double> sorted = mu;
    std::sort(sorted.begin(), sorted.end());
    const double eps_mid = sorted[sorted.size() / 2] * std::pow(h, m / (m + 1.0));
    out.a_turning = turning_points(model, cat, 0, eps_mid).a;
    out.fit.expected = -out.a_turning;
    out.rel_error = std::abs(-out.fit.slope - out.a_turning) / out.a_turning;
    return out;
}

void write_rows_csv(std::ostream& os, const std::vector<Row>& rows) {
    os << "row,eps,h,m_star,mu_star,regime_tag,status,parity,P_numeric,P_theorem1,P_theorem2,P_chain,"
          "residual_theorem1,residual_theorem2,residual_chain,unitarity_defect,steps,error\n";
    for (const Row& r : rows) {
        const auto res = [&](double p) {
            return std::isnan(p) || std::isnan(r.p_numeric) ? std::numeric_limits<double>::quiet_NaN()
                                                             : std::abs(r.p_numeric - p);
        };
        os << r.row << ',' << fmt(r.eps) << ',' << fmt(r.h) << ',' << r.m_star << ',' << fmt(r.mu_star) << ','
           << r.regime_tag << ',' << r.status << ',' << r.parity << ',' << fmt(r.p_numeric) << ','
           << fmt(r.p_theorem1) << ',' << fmt(r.p_theorem2) << ',' << fmt(r.p_chain) << ','
           << fmt(res(r.p_theorem1)) << ',' << fmt(res(r.p_theorem2)) << ',' << fmt(res(r.p_chain)) << ','
           << fmt(r.unitarity_defect) << ',' << r.steps << ',' << r.error << '\n';
    }
}

json rows_to_json(const std::vector<Row>& rows) {
    json a = json::array();
    const auto num = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
    for (const Row& r : rows) {
        a.push_back({{"row", r.row},
                     {"epsilon", r.eps},
                     {"h", r.h},
                     {"m_star", r.m_star},
                     {"mu_star", r.mu_star},
                     {"regime_tag", r.regime_tag},
                     {"status", r.status},
                     {"parity", r.parity},
                     {"P_numeric", num(r.p_numeric)},
                     {"P_theorem1", num(r.p_theorem1)},
                     {"P_theorem2", num(r.p_theorem2)},
                     {"P_chain", num(r.p_chain)},
                     {"unitarity_defect", num(r.unitarity_defect)},
                     {"steps", r.steps},
                     {"error", r.error}});
    }
    return a;
}

json report_metadata(const SweepConfig& c, double wall_seconds) {
    const json cj = sweep_config_to_json(c);
    return {{"schema", kCsvSchemaVersion},
            {"version", version_string()},
            {"config_hash", config_hash(cj)},
            {"config", cj},
            {"wall_seconds", wall_seconds}};
}

std::string version_string() { return CROSSLAB_VERSION; }

}  // namespace crosslab
