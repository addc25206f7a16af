#pragma once

#include <optional>
#include <string>

#include "mcflab/avoidance.hpp"
#include "mcflab/config.hpp"
#include "mcflab/harmonic.hpp"

namespace mcflab {

struct RunOverrides {
    std::optional<int> grid_n;
    std::optional<double> t_end;
    std::optional<double> tolerance;
    bool quiet = false;
};

struct RunResult {
    int exit_code = 0;
    std::string status;   // ok | hypothesis_unmet | failed
    std::string summary;  // human-readable per-check lines
    double d0 = 0.0;
    AvoidanceReport report;
};

// Runs the whole pipeline for one scenario: build sets, optionally build
// the midsurface, evolve, verify, emit CSV/SVG (paths relative to
// base_dir). Exit code 0 iff every enabled check passes.
RunResult run_scenario(const ScenarioConfig& config, const RunOverrides& ov = {},
                       const std::string& base_dir = ".");

// Runs every *.cfg in the directory (concurrently, capped by
// MCF_AVOID_THREADS); returns the worst exit code.
int run_suite(const std::string& dir, const RunOverrides& ov = {});

// Thread budget from MCF_AVOID_THREADS (default: hardware concurrency).
int thread_budget();

// Builds the union of the configured shapes as a reinitialized region.
RegionSet build_shape_region(const std::vector<ShapeSpec>& shapes, const Grid& g,
                             const MetricSpec& metric);

// Evolves two independent flows, on separate threads when the budget
// allows.
std::pair<Trajectory, Trajectory> evolve_pair(
    const RegionSet& x, const RegionSet& y,
    std::shared_ptr<const MetricSpec> metric, const FlowParams& params,
    const std::vector<double>& record_times);

}  // namespace mcflab
