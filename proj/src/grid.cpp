#include "mcflab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mcflab {

Grid::Grid(int nx, int ny, double xmin, double xmax, double ymin, double ymax)
    : nx_(nx), ny_(ny), xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
    if (nx < 16 || ny < 16)
        throw ValidationError("grid needs nx, ny >= 16");
    if (!(xmax > xmin) || !(ymax > ymin))
        throw ValidationError("grid bounds must be increasing");
    const double hx = (xmax - xmin) / (nx - 1);
    const double hy = (ymax - ymin) / (ny - 1);
    if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
        throw ValidationError("grid spacing must be equal on both axes");
    h_ = hx;
}

double ScalarField::interp(double x, double y) const {
    const Grid& g = grid_;
    double fx = (x - g.xmin()) / g.h();
    double fy = (y - g.ymin()) / g.h();
    int i = (int)std::floor(fx);
    int j = (int)std::floor(fy);
    i = std::clamp(i, 0, g.nx() - 2);
    j = std::clamp(j, 0, g.ny() - 2);
    double tx = std::clamp(fx - i, 0.0, 1.0);
    double ty = std::clamp(fy - j, 0.0, 1.0);
    double v00 = (*this)(i, j), v10 = (*this)(i + 1, j);
    double v01 = (*this)(i, j + 1), v11 = (*this)(i + 1, j + 1);
    return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

void ScalarField::check_finite(const char* what) const {
    for (double v : v_)
        if (!std::isfinite(v))
            throw ValidationError(std::string(what) + " produced a non-finite value");
}

}  // namespace mcflab
