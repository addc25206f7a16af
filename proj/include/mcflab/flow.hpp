#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "mcflab/distance.hpp"

namespace mcflab {

struct FlowParams {
    double dt = 0.0;        // 0 = derive from the CFL bound
    double t_end = 0.0;
    double cfl = 0.4;
    int reinit_every = 5;
    double eps_reg = 1e-8;  // curvature regularization in |grad u|_eps
    int reinit_band = 12;   // reinit band half-width in cells; 0 = full grid

    // Parabolic stability bound for the explicit step.
    double dt_bound(const MetricSpec& m) const {
        const double h = m.grid().h();
        return cfl * h * h / (4.0 * m.max_inv_e2phi);
    }
    double effective_dt(const MetricSpec& m) const {
        return dt > 0.0 ? dt : dt_bound(m);
    }
};

// Time-stamped weak-set-flow track: reinitialized signed-distance states
// at strictly increasing recorded times.
struct Trajectory {
    std::vector<double> times;
    std::vector<RegionSet> states;
    std::shared_ptr<const MetricSpec> metric;
    double dt = 0.0;
    bool extinct = false;
    double extinction_time = std::numeric_limits<double>::infinity();

    size_t size() const { return times.size(); }
};

// One explicit Euler step of
//   u_t = e^{-2 phi} |grad u| [ div(grad u/|grad u|_eps)
//                               + grad phi . grad u / |grad u|_eps ],
// the level-set form of mean curvature flow in the conformal metric
// (a Euclidean circle with u < 0 inside shrinks).
RegionSet mcf_step(const RegionSet& region, const MetricSpec& metric, double dt,
                   const FlowParams& params = {});

// Rebuilds u as the signed geodesic distance to its current zero level set
// (eikonal both sides, sign preserved). Throws EmptyRegion when the zero
// set is gone, which signals extinction.
RegionSet reinitialize(const RegionSet& region, const MetricSpec& metric);

// Runs the flow to the last requested record time; stops early at
// extinction. record_times must lie in [0, t_end]; when empty, {0, t_end}
// is used.
Trajectory evolve(const RegionSet& initial,
                  std::shared_ptr<const MetricSpec> metric,
                  const FlowParams& params, std::vector<double> record_times);

// Exponential offset tube of Cor-style form t -> {p : d(p, X(t)) <= c e^{lambda t}},
// built from a fresh eikonal solve per recorded state. Requires
// lambda < metric.lambda_lower (strictly).
Trajectory offset_flow(const Trajectory& base, double c, double lambda,
                       const MetricSpec& metric);

}  // namespace mcflab
