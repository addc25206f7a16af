#include "mcflab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "mcflab/expr.hpp"
#include "mcflab/oracle.hpp"
#include "mcflab/svg.hpp"

namespace mcflab {

namespace {

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::function<double(double, double)> shape_fn(const ShapeSpec& s) {
    switch (s.kind) {
        case ShapeSpec::Kind::Circle: {
            const double cx = s.p[0], cy = s.p[1], r = s.p[2];
            return [=](double x, double y) { return std::hypot(x - cx, y - cy) - r; };
        }
        case ShapeSpec::Kind::Halfplane: {
            const double n = std::hypot(s.p[0], s.p[1]);
            const double a = s.p[0] / n, b = s.p[1] / n, c = s.p[2] / n;
            return [=](double x, double y) { return a * x + b * y - c; };
        }
        case ShapeSpec::Kind::GraphBand: {
            const double amp = s.p[0];
            return [=](double x, double y) {
                return std::abs(y) - amp / (1.0 + x * x);
            };
        }
        case ShapeSpec::Kind::Custom: {
            auto e = std::make_shared<Expr>(s.expr);
            return [e](double x, double y) { return e->eval(x, y); };
        }
    }
    return {};
}

}  // namespace

RegionSet build_shape_region(const std::vector<ShapeSpec>& shapes, const Grid& g,
                             const MetricSpec& metric) {
    if (shapes.empty()) throw ValidationError("no shapes given for a region");
    std::vector<std::function<double(double, double)>> fns;
    for (const ShapeSpec& s : shapes) fns.push_back(shape_fn(s));
    RegionSet r = region_from_implicit(g, [&](double x, double y) {
        double v = fns[0](x, y);
        for (size_t k = 1; k < fns.size(); ++k) v = std::min(v, fns[k](x, y));
        return v;
    });
    return reinitialize(r, metric);
}

int thread_budget() {
    if (const char* env = std::getenv("MCF_AVOID_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : (int)hw;
}

std::pair<Trajectory, Trajectory> evolve_pair(
    const RegionSet& x, const RegionSet& y,
    std::shared_ptr<const MetricSpec> metric, const FlowParams& params,
    const std::vector<double>& record_times) {
    if (thread_budget() >= 2) {
        auto fx = std::async(std::launch::async, [&]() {
            return evolve(x, metric, params, record_times);
        });
        Trajectory ty = evolve(y, metric, params, record_times);
        return {fx.get(), std::move(ty)};
    }
    return {evolve(x, metric, params, record_times),
            evolve(y, metric, params, record_times)};
}

namespace {

struct CsvRow {
    double t, d_xy, d_xm, d_my, weighted;
    std::string status;
};

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << "t,d_XY,d_XM,d_MY,weighted_XY,status\n";
    for (const CsvRow& r : rows)
        f << fmt9(r.t) << "," << fmt9(r.d_xy) << "," << fmt9(r.d_xm) << ","
          << fmt9(r.d_my) << "," << fmt9(r.weighted) << "," << r.status << "\n";
    if (!f) throw IoError("failed writing '" + path + "'");
}

std::string svg_frame_path(const std::string& csv_path, size_t frame) {
    std::string stem = csv_path;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv")
        stem = stem.substr(0, stem.size() - 4);
    char buf[32];
    std::snprintf(buf, sizeof buf, "_f%03zu.svg", frame);
    return stem + buf;
}

// Concentric-circle oracle for report.oracle = auto; ValidationError when
// the scenario shape does not match a supported closed form.
std::vector<double> concentric_oracle(const ScenarioConfig& c,
                                      const std::vector<double>& times) {
    if (c.shapes_x.size() != 1 || c.shapes_y.size() != 1 ||
        c.shapes_x[0].kind != ShapeSpec::Kind::Circle ||
        c.shapes_y[0].kind != ShapeSpec::Kind::Circle)
        throw ValidationError(
            "report.oracle = auto needs one circle per side");
    const ShapeSpec& sx = c.shapes_x[0];
    const ShapeSpec& sy = c.shapes_y[0];
    if (std::abs(sx.p[0] - sy.p[0]) > 1e-12 || std::abs(sx.p[1] - sy.p[1]) > 1e-12)
        throw ValidationError("report.oracle = auto needs concentric circles");

    if (c.metric_kind == MetricKind::Euclidean) {
        const OracleResult a = oracle(OracleKind::EuclidCircle, {sx.p[2]}, times);
        const OracleResult b = oracle(OracleKind::EuclidCircle, {sy.p[2]}, times);
        std::vector<double> out;
        for (size_t k = 0; k < times.size(); ++k) {
            if (a.past_extinction[k] || b.past_extinction[k])
                throw ValidationError("oracle cross-check past extinction");
            out.push_back(std::abs(b.values[k] - a.values[k]));
        }
        return out;
    }
    if (c.metric_kind == MetricKind::PoincareDisk) {
        if (std::abs(sx.p[0]) > 1e-12 || std::abs(sx.p[1]) > 1e-12)
            throw ValidationError(
                "report.oracle = auto needs origin-centred circles in the "
                "Poincare disk");
        const double sa = 2.0 * std::atanh(sx.p[2]);
        const double sb = 2.0 * std::atanh(sy.p[2]);
        const OracleResult a = oracle(OracleKind::HyperbolicCircle, {sa}, times);
        const OracleResult b = oracle(OracleKind::HyperbolicCircle, {sb}, times);
        std::vector<double> out;
        for (size_t k = 0; k < times.size(); ++k) {
            if (a.past_extinction[k] || b.past_extinction[k])
                throw ValidationError("oracle cross-check past extinction");
            out.push_back(std::abs(b.values[k] - a.values[k]));
        }
        return out;
    }
    throw ValidationError("report.oracle = auto supports euclidean and "
                          "poincare_disk metrics only");
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config_in, const RunOverrides& ov,
                       const std::string& base_dir) {
    ScenarioConfig config = config_in;
    if (ov.grid_n) config.grid_n = *ov.grid_n;
    if (ov.t_end) config.t_end = *ov.t_end;
    if (ov.tolerance) config.tolerance = *ov.tolerance;

    const Grid grid(config.grid_n, config.grid_n, config.xmin, config.xmax,
                    config.ymin, config.ymax);
    const double h = grid.h();
    auto metric = std::make_shared<const MetricSpec>(
        make_metric(config.metric_kind, grid, config.metric_phi));

    RunResult res;
    std::ostringstream log;

    const RegionSet X = build_shape_region(config.shapes_x, grid, *metric);
    const RegionSet Y = build_shape_region(config.shapes_y, grid, *metric);
    const double D0 = set_distance(X, Y, *metric);
    res.d0 = D0;
    log << "scenario " << config.name << ": D(0) = " << fmt9(D0) << "\n";

    const std::string csv_path =
        (std::filesystem::path(base_dir) / config.csv_path()).string();

    // The avoidance statement quantifies over flows with positive initial
    // distance; below grid resolution the hypothesis is unmet and there is
    // nothing to verify.
    if (config.hypothesis_unmet_expected && D0 < 2.0 * h) {
        log << "hypothesis unmet: D(0) = " << fmt9(D0) << " < 2h = "
            << fmt9(2.0 * h) << "; theorem hypotheses not satisfied at grid "
            << "scale, no verdict\n";
        write_csv(csv_path, {{0.0, D0, INFINITY, INFINITY, D0,
                              "hypothesis_unmet"}});
        if (config.svg_every > 0)
            render_svg({{"x-set", &X}, {"y-set", &Y}}, grid,
                       svg_frame_path(csv_path, 0));
        res.exit_code = 0;
        res.status = "hypothesis_unmet";
        res.summary = log.str();
        if (!ov.quiet) std::cout << res.summary;
        return res;
    }
    if (D0 <= 0.0)
        throw ValidationError(
            "scenario '" + config.name +
            "': X and Y overlap (set_distance = 0) and the scenario is not "
            "tagged hypothesis_unmet_expected");

    std::vector<double> record_times = config.record_times;
    if (record_times.empty())
        for (int k = 0; k <= 4; ++k)
            record_times.push_back(config.t_end * k / 4.0);

    FlowParams params;
    params.dt = config.dt;
    params.t_end = config.t_end;
    params.cfl = config.cfl;
    params.reinit_every = config.reinit_every;
    params.eps_reg = config.eps_reg;

    // Optional midsurface construction before anything moves.
    std::optional<Trajectory> trajM;
    if (config.interp_enable) {
        const DistanceField dX = eikonal_distance(X, *metric);
        const DistanceField dY = eikonal_distance(Y, *metric);
        const double R = D0 / 2.0;
        const double rho = R - config.interp_k * h;
        if (rho <= 0.0)
            throw ValidationError("scenario '" + config.name +
                                  "': interp rho = R - k h is not positive");
        const OffsetMask mask = offset_region(dX, dY, rho);
        const HarmonicField hf = harmonic_interpolant(mask, *metric);
        const double c = select_regular_value(hf);
        const Midsurface ms = extract_midsurface(hf, c, dX, rho, *metric);
        log << "midsurface: c = " << fmt9(c) << ", rho = " << fmt9(rho)
            << ", band nodes = " << ms.band.size() << "\n";
        trajM = evolve(ms.sigma, metric, params, record_times);
    }

    auto [trajX_base, trajY] = evolve_pair(X, Y, metric, params, record_times);

    Trajectory trajX = trajX_base;
    if (config.offset_enable)
        trajX = offset_flow(trajX_base, config.offset_c, config.offset_lambda,
                            *metric);

    const AvoidanceReport rep =
        avoidance_report(trajX, trajY, *metric, config.tolerance);
    res.report = rep;

    bool all_ok = true;
    auto check = [&](const char* what, bool ok, const std::string& detail) {
        log << (ok ? "  [ok]   " : "  [FAIL] ") << what << ": " << detail << "\n";
        all_ok = all_ok && ok;
    };

    check("weighted monotonicity", rep.pass,
          "worst violation " + fmt9(rep.worst_violation) + " vs tolerance " +
              fmt9(rep.tolerance) + (rep.truncated_at_extinction
                                         ? " (truncated at extinction)"
                                         : ""));

    if (config.oracle_check) {
        const std::vector<double> ref = concentric_oracle(config, rep.times);
        double worst = 0.0;
        for (size_t k = 0; k < ref.size(); ++k)
            worst = std::max(worst,
                             std::abs(rep.D[k] - ref[k]) / std::max(ref[k], 1e-12));
        check("oracle cross-check", worst <= 0.03,
              "max relative deviation " + fmt9(worst) + " vs 0.03");
    }

    for (double lam : config.report_lambdas) {
        const AvoidanceReport rw = reweight_report(rep, lam);
        check("reweighted monotonicity", rw.pass,
              "lambda " + fmt9(lam) + ", worst violation " +
                  fmt9(rw.worst_violation));
    }

    // Distances to the midsurface flow plus the discrete triangle split.
    const size_t n_common =
        trajM ? std::min(rep.times.size(), trajM->size()) : rep.times.size();
    std::vector<double> d_xm(n_common, INFINITY), d_my(n_common, INFINITY);
    if (trajM) {
        bool triangle_ok = true;
        double worst_gap = 0.0;
        for (size_t k = 0; k < n_common; ++k) {
            d_xm[k] = set_distance(trajX.states[k], trajM->states[k], *metric);
            d_my[k] = set_distance(trajM->states[k], trajY.states[k], *metric);
            const double gap = rep.D[k] - (d_xm[k] + d_my[k] - 4.0 * h);
            worst_gap = std::min(gap, worst_gap);
            if (gap < 0.0) triangle_ok = false;
        }
        check("triangle split d_XY >= d_XM + d_MY - 4h", triangle_ok,
              "worst slack " + fmt9(worst_gap));
    }

    if (config.offset_enable) {
        bool tube_ok = true;
        double worst = 0.0;
        for (size_t k = 0; k < std::min(trajX.size(), trajX_base.size()); ++k) {
            if (config.offset_c == 0.0) break;
            const double want =
                config.offset_c * std::exp(config.offset_lambda * trajX.times[k]);
            const double got =
                set_distance(trajX_base.states[k], trajX.states[k], *metric);
            worst = std::max(worst, std::abs(got - want));
            if (std::abs(got - want) > 2.0 * h) tube_ok = false;
        }
        check("offset tube width c e^{lambda t}", tube_ok,
              "max deviation " + fmt9(worst) + " vs 2h = " + fmt9(2.0 * h));
    }

    std::vector<CsvRow> rows;
    for (size_t k = 0; k < rep.times.size(); ++k) {
        CsvRow row{rep.times[k], rep.D[k], INFINITY, INFINITY, rep.weighted[k],
                   "ok"};
        if (trajM && k < n_common) {
            row.d_xm = d_xm[k];
            row.d_my = d_my[k];
        }
        rows.push_back(row);
    }
    write_csv(csv_path, rows);

    if (config.svg_every > 0) {
        for (size_t k = 0; k < rep.times.size(); k += (size_t)config.svg_every) {
            std::vector<std::pair<std::string, const RegionSet*>> regions;
            regions.push_back({"x-set", &trajX.states[k]});
            regions.push_back({"y-set", &trajY.states[k]});
            if (trajM && k < trajM->size())
                regions.push_back({"m-set", &trajM->states[k]});
            render_svg(regions, grid, svg_frame_path(csv_path, k));
        }
    }

    if (trajX.extinct)
        log << "  note: X extinct at t = " << fmt9(trajX.extinction_time) << "\n";
    if (trajY.extinct)
        log << "  note: Y extinct at t = " << fmt9(trajY.extinction_time) << "\n";

    res.exit_code = all_ok ? 0 : 1;
    res.status = all_ok ? "ok" : "failed";
    log << "scenario " << config.name << ": " << res.status << "\n";
    res.summary = log.str();
    if (!ov.quiet) std::cout << res.summary;
    return res;
}

int run_suite(const std::string& dir, const RunOverrides& ov) {
    std::vector<std::string> configs;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".cfg")
            configs.push_back(entry.path().string());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        std::cerr << "no .cfg files in " << dir << "\n";
        return 2;
    }

    RunOverrides quiet_ov = ov;
    quiet_ov.quiet = true;

    const int budget = std::max(1, thread_budget());
    std::vector<std::future<std::pair<int, std::string>>> futures(configs.size());
    int exit_code = 0;
    size_t next = 0;
    std::vector<std::pair<int, std::string>> results(configs.size());
    while (next < configs.size()) {
        const size_t batch = std::min((size_t)budget, configs.size() - next);
        for (size_t b = 0; b < batch; ++b) {
            const std::string path = configs[next + b];
            futures[next + b] = std::async(std::launch::async, [path, &quiet_ov,
                                                                &dir]() {
                try {
                    const ScenarioConfig c = load_config_file(path);
                    const RunResult r = run_scenario(c, quiet_ov, dir);
                    return std::make_pair(r.exit_code, r.summary);
                } catch (const std::exception& e) {
                    return std::make_pair(2, path + ": error: " + e.what() + "\n");
                }
            });
        }
        for (size_t b = 0; b < batch; ++b)
            results[next + b] = futures[next + b].get();
        next += batch;
    }
    for (const auto& [code, summary] : results) {
        if (!ov.quiet) std::cout << summary;
        exit_code = std::max(exit_code, code);
    }
    return exit_code;
}

}  // namespace mcflab
