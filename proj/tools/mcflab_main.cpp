#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcflab/config.hpp"
#include "mcflab/oracle.hpp"
#include "mcflab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"level-set mean-curvature-flow avoidance laboratory"};
    app.require_subcommand(1);

    mcflab::RunOverrides ov;
    int grid_n = 0;
    double t_end = 0.0, tolerance = -1.0;
    bool quiet = false;
    app.add_option("--grid-n", grid_n, "override grid.n");
    app.add_option("--t-end", t_end, "override flow.t_end");
    app.add_option("--tolerance", tolerance, "override report.tolerance");
    app.add_flag("--quiet", quiet, "suppress per-check output");

    std::string run_path;
    CLI::App* run = app.add_subcommand("run", "run one scenario config");
    run->add_option("config", run_path, "scenario .cfg path")->required();

    std::string suite_dir;
    CLI::App* suite = app.add_subcommand("suite", "run every .cfg in a directory");
    suite->add_option("dir", suite_dir, "directory of scenario configs")->required();

    std::string oracle_kind;
    std::vector<double> oracle_args;
    CLI::App* orc = app.add_subcommand("oracle", "evaluate a reference oracle");
    orc->add_option("kind", oracle_kind,
                    "euclid_circle | hyperbolic_circle | annulus_harmonic | exp_offset")
        ->required();
    orc->add_option("params", oracle_args, "kind parameters followed by inputs")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (grid_n > 0) ov.grid_n = grid_n;
    if (t_end > 0.0) ov.t_end = t_end;
    if (tolerance >= 0.0) ov.tolerance = tolerance;
    ov.quiet = quiet;

    try {
        if (*run) {
            const mcflab::ScenarioConfig c = mcflab::load_config_file(run_path);
            const std::string dir =
                std::filesystem::path(run_path).parent_path().string();
            const mcflab::RunResult r =
                mcflab::run_scenario(c, ov, dir.empty() ? "." : dir);
            return r.exit_code;
        }
        if (*suite) return mcflab::run_suite(suite_dir, ov);
        if (*orc) {
            const mcflab::OracleKind kind =
                mcflab::oracle_kind_from_name(oracle_kind);
            const size_t nparams =
                kind == mcflab::OracleKind::EuclidCircle ||
                        kind == mcflab::OracleKind::HyperbolicCircle
                    ? 1
                    : 2;
            if (oracle_args.size() <= nparams) {
                std::cerr << "oracle " << oracle_kind << " needs " << nparams
                          << " parameter(s) plus at least one input\n";
                return 2;
            }
            const std::vector<double> params(oracle_args.begin(),
                                             oracle_args.begin() + nparams);
            const std::vector<double> inputs(oracle_args.begin() + nparams,
                                             oracle_args.end());
            const mcflab::OracleResult r = mcflab::oracle(kind, params, inputs);
            for (size_t k = 0; k < r.inputs.size(); ++k) {
                if (r.past_extinction[k])
                    std::printf("%.9g extinct\n", r.inputs[k]);
                else
                    std::printf("%.9g %.9g\n", r.inputs[k], r.values[k]);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
