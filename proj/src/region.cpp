#include "mcflab/region.hpp"

namespace mcflab {

RegionSet region_from_implicit(const Grid& g,
                               const std::function<double(double, double)>& f) {
    RegionSet r(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            r.u(i, j) = f(g.x(i), g.y(j));
    r.u.check_finite("region_from_implicit");
    return r;
}

std::vector<Crossing> interface_crossings(const ScalarField& u) {
    const Grid& g = u.grid();
    std::vector<Crossing> out;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double a = u(i, j);
            if (i + 1 < g.nx()) {
                const double b = u(i + 1, j);
                if ((a <= 0.0) != (b <= 0.0))
                    out.push_back({i, j, true, a / (a - b)});
            }
            if (j + 1 < g.ny()) {
                const double b = u(i, j + 1);
                if ((a <= 0.0) != (b <= 0.0))
                    out.push_back({i, j, false, a / (a - b)});
            }
        }
    }
    return out;
}

bool has_interface(const ScalarField& u) {
    bool neg = false, pos = false;
    for (double v : u.data()) {
        if (v <= 0.0) neg = true;
        else pos = true;
        if (neg && pos) return true;
    }
    return false;
}

bool all_nonpositive(const ScalarField& u) {
    for (double v : u.data())
        if (v > 0.0) return false;
    return true;
}

bool all_positive(const ScalarField& u) {
    for (double v : u.data())
        if (v <= 0.0) return false;
    return true;
}

}  // namespace mcflab
