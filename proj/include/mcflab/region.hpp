#pragma once

#include <functional>
#include <vector>

#include "mcflab/grid.hpp"

namespace mcflab {

// Closed set represented as the zero-sublevel set {u <= 0} of a signed
// field (negative inside, positive outside, zero on the interface).
struct RegionSet {
    ScalarField u;

    explicit RegionSet(const Grid& g) : u(g) {}
    explicit RegionSet(ScalarField f) : u(std::move(f)) {}

    const Grid& grid() const { return u.grid(); }
};

// Grid edge crossed by the interface. theta in (0,1] is the fraction of
// the edge from node (i,j) to its +x (horizontal) or +y neighbor at which
// u interpolates to zero.
struct Crossing {
    int i, j;
    bool horizontal;
    double theta;
};

RegionSet region_from_implicit(const Grid& g,
                               const std::function<double(double, double)>& f);

std::vector<Crossing> interface_crossings(const ScalarField& u);
bool has_interface(const ScalarField& u);
bool all_nonpositive(const ScalarField& u);
bool all_positive(const ScalarField& u);

// World coordinates of a crossing point.
inline void crossing_point(const Grid& g, const Crossing& c, double& x, double& y) {
    x = g.x(c.i) + (c.horizontal ? c.theta * g.h() : 0.0);
    y = g.y(c.j) + (c.horizontal ? 0.0 : c.theta * g.h());
}

}  // namespace mcflab
