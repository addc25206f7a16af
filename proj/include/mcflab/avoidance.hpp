#pragma once

#include <optional>
#include <vector>

#include "mcflab/flow.hpp"

namespace mcflab {

// Weighted distance monotonicity along a pair of flows: the series
// e^{-Lambda t} d(X(t), Y(t)) must be nondecreasing (within tolerance).
struct AvoidanceReport {
    std::vector<double> times;
    std::vector<double> D;         // d(X(t), Y(t))
    std::vector<double> weighted;  // e^{-lambda t} D(t)
    double lambda_used = 0.0;
    double tolerance = 0.0;
    double worst_violation = 0.0;  // max over k of weighted[k] - weighted[k+1]
    bool pass = false;
    bool above_initial = false;    // weighted[k] >= weighted[0] - tol for all k
    bool truncated_at_extinction = false;
};

// tolerance < 0 picks the default 2h + dt.
AvoidanceReport avoidance_report(const Trajectory& trajX, const Trajectory& trajY,
                                 const MetricSpec& metric, double tolerance = -1.0);

// Re-evaluates the recorded series under a different exponential weight.
AvoidanceReport reweight_report(const AvoidanceReport& rep, double lambda,
                                double tolerance = -1.0);

// Distance to a static reference set with the fitted approach speed
// (finite-speed-bound checker).
struct SpeedReport {
    std::vector<double> times;
    std::vector<double> d;
    double R = 0.0;       // initial distance
    double h_fit = 0.0;   // max over t>0 of (R - d(t))/t, clamped at 0
    std::optional<double> h_user;
    bool user_bound_ok = true;  // d(t) >= R - h_user t - tol for all samples
    double tolerance = 0.0;
};

SpeedReport finite_speed_check(const Trajectory& trajX, const RegionSet& reference,
                               const MetricSpec& metric,
                               std::optional<double> h_user = {});

// Largest recorded delta with every state in [0, delta] inside the
// epsilon-neighborhood of the initial set.
double escape_bound_check(const Trajectory& traj, double epsilon);

// Mutual approach rate: smallest h2 with D(t) >= D(0) - 2 h2 t on all samples.
struct ApproachReport {
    std::vector<double> times;
    std::vector<double> D;
    double h2_fit = 0.0;
    bool finite = true;
};

ApproachReport approach_rate_check(const Trajectory& trajX,
                                   const Trajectory& trajY,
                                   const MetricSpec& metric);

}  // namespace mcflab
