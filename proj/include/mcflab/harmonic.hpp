#pragma once

#include <vector>

#include "mcflab/distance.hpp"

namespace mcflab {

// Harmonic interpolant h on the offset region K(rho), 0 on the X-side
// boundary and 1 on the Y-side. In 2D the Laplace-Beltrami operator of a
// conformal metric has the same kernel as the flat Laplacian, so the flat
// 5-point solve is exact for every supported metric.
struct HarmonicField {
    OffsetMask mask;
    ScalarField h;          // values on mask nodes; 0 elsewhere
    double rho = 0.0;
    double residual = 0.0;  // final max-norm residual over interior nodes

    const Grid& grid() const { return h.grid(); }
};

HarmonicField harmonic_interpolant(const OffsetMask& mask, const MetricSpec& metric);

// Regular level value: c = 1/2 when the gradient stays away from zero on
// the level band, otherwise the best candidate in [1/3, 2/3]; throws
// NoRegularValue on a degenerate plateau.
double select_regular_value(const HarmonicField& hf);

// Midsurface Sigma = boundary of Omega = {h <= c} union {dX <= rho},
// stored as a reinitialized signed region; nu = grad h/|grad h| sampled on
// the Sigma band.
struct Midsurface {
    double c = 0.5;
    double rho = 0.0;
    RegionSet sigma;

    struct BandNode {
        int idx;
        double nux, nuy;  // unit normal (flat components)
        double grad_h;    // |grad h| at the node
    };
    std::vector<BandNode> band;
};

Midsurface extract_midsurface(const HarmonicField& hf, double c,
                              const DistanceField& dx, double rho,
                              const MetricSpec& metric);

// Uniform-C1-near-boundary diagnostic: max normal angle between nearby
// Sigma band nodes close to the mask boundary, plus the gradient floor.
struct C1Report {
    double max_angle = 0.0;
    double min_grad = 0.0;
    int pair_count = 0;
    int node_count = 0;
};

C1Report uniform_c1_check(const Midsurface& ms, const DistanceField& dx,
                          const DistanceField& dy, double delta);

}  // namespace mcflab
