#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mcflab/errors.hpp"

namespace mcflab {

// Uniform node-centered Cartesian grid on [xmin,xmax] x [ymin,ymax].
// Spacing is identical along both axes; node (i,j) sits at
// (xmin + i*h, ymin + j*h), which is bit-reproducible from the indices.
class Grid {
public:
    Grid(int nx, int ny, double xmin, double xmax, double ymin, double ymax);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int size() const { return nx_ * ny_; }
    double xmin() const { return xmin_; }
    double xmax() const { return xmax_; }
    double ymin() const { return ymin_; }
    double ymax() const { return ymax_; }
    double h() const { return h_; }

    int index(int i, int j) const { return j * nx_ + i; }
    int ix(int idx) const { return idx % nx_; }
    int iy(int idx) const { return idx / nx_; }
    double x(int i) const { return xmin_ + i * h_; }
    double y(int j) const { return ymin_ + j * h_; }

    // Diagonal extent of the box (flat metric).
    double diameter() const { return std::hypot(xmax_ - xmin_, ymax_ - ymin_); }

    // Index of the node coinciding with (x,y); exact for node coordinates.
    int nearest_i(double x) const { return (int)std::lround((x - xmin_) / h_); }
    int nearest_j(double y) const { return (int)std::lround((y - ymin_) / h_); }

    bool same_geometry(const Grid& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && xmin_ == o.xmin_ &&
               xmax_ == o.xmax_ && ymin_ == o.ymin_ && ymax_ == o.ymax_;
    }
    bool operator==(const Grid& o) const { return same_geometry(o); }

private:
    int nx_, ny_;
    double xmin_, xmax_, ymin_, ymax_;
    double h_;
};

// Grid-sampled real function. Values are plain doubles indexed j*nx+i.
class ScalarField {
public:
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid_(g), v_((size_t)g.size(), fill) {}

    const Grid& grid() const { return grid_; }

    double operator()(int i, int j) const { return v_[(size_t)grid_.index(i, j)]; }
    double& operator()(int i, int j) { return v_[(size_t)grid_.index(i, j)]; }
    double at(int idx) const { return v_[(size_t)idx]; }
    double& at(int idx) { return v_[(size_t)idx]; }

    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

    // Bilinear interpolation at an arbitrary point inside the box.
    double interp(double x, double y) const;

    // Throws ValidationError if any value is NaN or infinite.
    void check_finite(const char* what) const;

private:
    Grid grid_;
    std::vector<double> v_;
};

}  // namespace mcflab
