#pragma once

#include <memory>
#include <string>

#include "mcflab/grid.hpp"

namespace mcflab {

enum class MetricKind { Euclidean, PoincareDisk, CustomConformal };

// Conformal ambient metric g = e^{2*phi} * flat, with a Ricci lower bound.
// In 2D the Ricci curvature is K*g with K the Gauss curvature, and for a
// conformal factor K = -e^{-2*phi} * Laplacian(phi).
struct MetricSpec {
    MetricKind kind = MetricKind::Euclidean;
    ScalarField phi;
    ScalarField phi_x, phi_y;   // central-difference gradient of phi
    ScalarField inv_e2phi;      // e^{-2 phi}
    ScalarField e_phi;          // e^{+phi}
    double lambda_lower = 0.0;  // Ricci lower bound Lambda
    double max_inv_e2phi = 1.0; // cached: CFL bound uses max e^{-2 phi}
    double max_e_phi = 1.0;

    explicit MetricSpec(const Grid& g)
        : phi(g), phi_x(g), phi_y(g), inv_e2phi(g, 1.0), e_phi(g, 1.0) {}

    const Grid& grid() const { return phi.grid(); }
    bool compatible(const MetricSpec& o) const {
        return kind == o.kind && lambda_lower == o.lambda_lower &&
               grid().same_geometry(o.grid());
    }
};

// Builds a metric on the grid. phi_expression is required for
// CustomConformal and ignored otherwise. PoincareDisk requires the closed
// box to lie strictly inside the unit disk (DomainOutsideChart otherwise).
MetricSpec make_metric(MetricKind kind, const Grid& grid,
                       const std::string& phi_expression = "");

// Ricci lower bound: closed-form value for Euclidean (0) and PoincareDisk
// (-1); minimum of the discrete Gauss curvature over interior nodes for
// CustomConformal.
double ricci_lower_bound(const MetricSpec& m);

// Unclamped 5-point curvature minimum over interior nodes, for any kind.
double discrete_ricci_min(const MetricSpec& m);

// Gauss curvature at an interior node via the 5-point Laplacian.
double discrete_gauss_curvature(const MetricSpec& m, int i, int j);

// Length of the grid edge between adjacent nodes under the conformal
// metric, using the trapezoidal factor e^{(phi(p)+phi(q))/2}.
double metric_edge_length(const MetricSpec& m, int i0, int j0, int i1, int j1);

MetricKind metric_kind_from_name(const std::string& name);  // UnsupportedKind
std::string metric_kind_name(MetricKind kind);

}  // namespace mcflab
