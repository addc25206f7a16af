#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "mcflab/region.hpp"

namespace mcflab {

using Polyline = std::vector<std::array<double, 2>>;

// Marching-squares contours of the zero level set, chained into polylines
// (closed loops repeat their first vertex at the end).
std::vector<Polyline> extract_contours(const ScalarField& u);

// Writes one SVG with the zero sets of the given regions as path elements
// (ids in caller order, e.g. x-set, y-set, m-set); a region without an
// interface contributes no path element.
void render_svg(const std::vector<std::pair<std::string, const RegionSet*>>& regions,
                const Grid& grid, const std::string& path);

}  // namespace mcflab
