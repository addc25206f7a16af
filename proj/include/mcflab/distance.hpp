#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mcflab/metric.hpp"
#include "mcflab/region.hpp"

namespace mcflab {

// Unsigned geodesic distance to a source region (zero on its interface
// and interior).
struct DistanceField {
    ScalarField d;
    std::shared_ptr<const RegionSet> source;

    const Grid& grid() const { return d.grid(); }
};

// Solves |grad d|_flat = e^{phi} outward from the interface of `region`
// by first-order upwind fast sweeping with subcell interface seeding.
// Throws EmptyRegion if the region has no points.
DistanceField eikonal_distance(const RegionSet& region, const MetricSpec& metric);

// Geodesic distance between two regions: minimum of the interpolated
// eikonal_distance(a) over the subcell zero crossings of b's interface.
double set_distance(const RegionSet& a, const RegionSet& b, const MetricSpec& metric);

enum class BoundaryLabel : uint8_t { XSide = 0, YSide = 1, Ambiguous = 2 };

// Offset region K(rho) = {p : min(dX,dY) >= rho} with labeled boundary.
struct OffsetMask {
    Grid grid;
    double rho = 0.0;
    std::vector<uint8_t> in_mask;

    struct Boundary {
        int idx;
        BoundaryLabel label;
        double overshoot;  // min(dX,dY) - rho at the node, >= 0
    };
    std::vector<Boundary> boundary;

    // Excluded nodes classified by which distance dips below rho
    // (a node can appear in both lists).
    std::vector<int> excluded_x;
    std::vector<int> excluded_y;

    int mask_count = 0;
    int ambiguous_count = 0;
};

OffsetMask offset_region(const DistanceField& dx, const DistanceField& dy,
                         double rho);

// Gradient-alignment diagnostic near the equidistant set: over nodes with
// |dX - R| <= delta/2 and |dY - R| <= delta/2 (R = half the set-to-set
// distance), the angle between grad dX and -grad dY.
struct AlignmentReport {
    double max_angle = 0.0;
    double mean_angle = 0.0;
    double closest_angle = 0.0;  // angle at the node realizing min(dX+dY)
    int count = 0;
    double band_radius = 0.0;  // the R used
};

AlignmentReport foot_direction_alignment(const DistanceField& dx,
                                         const DistanceField& dy,
                                         const MetricSpec& metric,
                                         double delta);

namespace detail {

// Shared fast-sweeping core. Computes the unsigned distance to the region
// {u <= 0}; if `band` is non-null only those node indices are solved and
// everything else reads as +inf (callers own the far field). Seeds u<=0
// nodes at zero and positive-side crossing nodes at subcell distances;
// runs monotone sweeps to an exact fixed point followed by edge-Lipschitz
// relaxation passes.
// freeze_ok (optional) restricts the away-from-interface unit-gradient
// freeze to flagged nodes; crossing-adjacent seeding is unaffected.
ScalarField unsigned_distance(const ScalarField& u, const MetricSpec& metric,
                              const std::vector<int>* band = nullptr,
                              const std::vector<uint8_t>* freeze_ok = nullptr);

// Central-difference gradient (one-sided at the box boundary).
void node_gradient(const ScalarField& f, int i, int j, double& gx, double& gy);

}  // namespace detail

}  // namespace mcflab
