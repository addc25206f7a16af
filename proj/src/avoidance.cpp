#include "mcflab/avoidance.hpp"

#include <algorithm>
#include <cmath>

namespace mcflab {

namespace {

// Common recorded prefix of two trajectories; one may be shorter after
// extinction (distance to an empty set is +inf, trivially monotone, so
// the report truncates there).
size_t common_prefix(const Trajectory& a, const Trajectory& b) {
    const size_t n = std::min(a.size(), b.size());
    for (size_t k = 0; k < n; ++k)
        if (std::abs(a.times[k] - b.times[k]) > 1e-12)
            throw TimeGridMismatch("trajectories have different recorded times");
    return n;
}

double default_tol(const Trajectory& t, const MetricSpec& m) {
    return 2.0 * m.grid().h() + t.dt;
}

void finish(AvoidanceReport& rep) {
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    if (rep.weighted.size() < 2) rep.worst_violation = 0.0;
    for (size_t k = 0; k + 1 < rep.weighted.size(); ++k)
        rep.worst_violation =
            std::max(rep.worst_violation, rep.weighted[k] - rep.weighted[k + 1]);
    rep.pass = rep.worst_violation <= rep.tolerance;
    rep.above_initial = true;
    for (size_t k = 0; k < rep.weighted.size(); ++k)
        if (rep.weighted[k] < rep.weighted.front() - rep.tolerance)
            rep.above_initial = false;
}

}  // namespace

AvoidanceReport avoidance_report(const Trajectory& trajX, const Trajectory& trajY,
                                 const MetricSpec& metric, double tolerance) {
    if (trajX.metric && trajY.metric && !trajX.metric->compatible(*trajY.metric))
        throw TimeGridMismatch("trajectories carry different metrics");
    if (trajX.size() == 0 || trajY.size() == 0)
        throw TimeGridMismatch("empty trajectory");
    const size_t n = common_prefix(trajX, trajY);

    AvoidanceReport rep;
    rep.lambda_used = metric.lambda_lower;
    rep.tolerance = tolerance >= 0.0 ? tolerance : default_tol(trajX, metric);
    rep.truncated_at_extinction = n < std::max(trajX.size(), trajY.size()) ||
                                  trajX.extinct || trajY.extinct;
    for (size_t k = 0; k < n; ++k) {
        const double d = set_distance(trajX.states[k], trajY.states[k], metric);
        rep.times.push_back(trajX.times[k]);
        rep.D.push_back(d);
        rep.weighted.push_back(std::exp(-rep.lambda_used * trajX.times[k]) * d);
    }
    finish(rep);
    return rep;
}

AvoidanceReport reweight_report(const AvoidanceReport& rep, double lambda,
                                double tolerance) {
    AvoidanceReport out = rep;
    out.lambda_used = lambda;
    out.tolerance = tolerance >= 0.0 ? tolerance : rep.tolerance;
    for (size_t k = 0; k < out.D.size(); ++k)
        out.weighted[k] = std::exp(-lambda * out.times[k]) * out.D[k];
    finish(out);
    return out;
}

SpeedReport finite_speed_check(const Trajectory& trajX, const RegionSet& reference,
                               const MetricSpec& metric,
                               std::optional<double> h_user) {
    if (trajX.size() == 0) throw TimeGridMismatch("empty trajectory");
    SpeedReport rep;
    rep.h_user = h_user;
    rep.tolerance = default_tol(trajX, metric);
    for (size_t k = 0; k < trajX.size(); ++k) {
        rep.times.push_back(trajX.times[k]);
        rep.d.push_back(set_distance(trajX.states[k], reference, metric));
    }
    rep.R = rep.d.front();
    if (rep.R <= 0.0)
        throw ZeroInitialDistance("finite_speed_check: reference touches X(0)");
    rep.h_fit = 0.0;
    for (size_t k = 1; k < rep.d.size(); ++k)
        rep.h_fit = std::max(rep.h_fit, (rep.R - rep.d[k]) / rep.times[k]);
    if (h_user) {
        rep.user_bound_ok = true;
        for (size_t k = 0; k < rep.d.size(); ++k)
            if (rep.d[k] < rep.R - *h_user * rep.times[k] - rep.tolerance)
                rep.user_bound_ok = false;
    }
    return rep;
}

double escape_bound_check(const Trajectory& traj, double epsilon) {
    if (!(epsilon > 0.0))
        throw ValidationError("escape_bound_check: epsilon must be > 0");
    if (traj.size() == 0) throw TimeGridMismatch("empty trajectory");
    const MetricSpec& m = *traj.metric;
    const ScalarField d0 = detail::unsigned_distance(traj.states[0].u, m);
    const Grid& g = d0.grid();

    double delta = traj.times[0];
    for (size_t k = 0; k < traj.size(); ++k) {
        const ScalarField& u = traj.states[k].u;
        bool inside = true;
        for (int idx = 0; idx < g.size() && inside; ++idx)
            if (u.at(idx) <= 0.0 && d0.at(idx) > epsilon) inside = false;
        if (inside) {
            for (const Crossing& c : interface_crossings(u)) {
                const double a = d0(c.i, c.j);
                const double b =
                    c.horizontal ? d0(c.i + 1, c.j) : d0(c.i, c.j + 1);
                if ((1.0 - c.theta) * a + c.theta * b > epsilon) {
                    inside = false;
                    break;
                }
            }
        }
        if (!inside) break;
        delta = traj.times[k];
    }
    return delta;
}

ApproachReport approach_rate_check(const Trajectory& trajX,
                                   const Trajectory& trajY,
                                   const MetricSpec& metric) {
    const size_t n = common_prefix(trajX, trajY);
    if (n == 0) throw TimeGridMismatch("empty trajectory");
    ApproachReport rep;
    for (size_t k = 0; k < n; ++k) {
        rep.times.push_back(trajX.times[k]);
        rep.D.push_back(set_distance(trajX.states[k], trajY.states[k], metric));
    }
    if (rep.D.front() <= 0.0)
        throw ZeroInitialDistance("approach_rate_check: D(0) must be positive");
    rep.h2_fit = 0.0;
    for (size_t k = 1; k < n; ++k)
        rep.h2_fit = std::max(rep.h2_fit,
                              (rep.D.front() - rep.D[k]) / (2.0 * rep.times[k]));
    rep.finite = std::isfinite(rep.h2_fit);
    return rep;
}

}  // namespace mcflab
