#include "mcflab/distance.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace mcflab {

namespace detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-node factor c_p = sqrt(h) * e^{phi/2}; the trapezoidal edge weight
// is then w(p,q) = c_p * c_q.
std::vector<double> edge_factors(const MetricSpec& m) {
    const Grid& g = m.grid();
    std::vector<double> c((size_t)g.size());
    const double sh = std::sqrt(g.h());
    for (int idx = 0; idx < g.size(); ++idx)
        c[(size_t)idx] = sh * std::exp(0.5 * m.phi.at(idx));
    return c;
}

// Subcell seeds: u<=0 nodes at distance zero; nodes of crossed edges at
// the gradient-normalized estimate |u| e^{phi} / |grad u| (central
// differences). Normalizing by the local gradient keeps the seeded zero
// set where the crossings are without the O(h^2 kappa) inward bias of
// chord or along-edge constructions - repeated reinitialization must not
// erode convex interfaces - and it rescales fields whose gradient has
// drifted from one. Degenerate gradients fall back to the along-edge
// crossing distance.
void seed(const ScalarField& u, const MetricSpec& m, ScalarField& d,
          std::vector<uint8_t>& frozen, const std::vector<uint8_t>* freeze_ok) {
    const Grid& g = u.grid();
    const int nx = g.nx(), ny = g.ny();
    const double h = g.h();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (u(i, j) <= 0.0) {
                d.at((size_t)g.index(i, j)) = 0.0;
                frozen[(size_t)g.index(i, j)] = 1;
            }

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double up = u(i, j);
            if (up <= 0.0) continue;
            const int idx = g.index(i, j);

            // along-edge crossing distances (also the fallback value)
            double de = kInf;
            auto edge = [&](int qi, int qj) {
                const double uq = u(qi, qj);
                if (uq > 0.0) return;
                const double theta = up / (up - uq);  // in (0,1]
                const double phic =
                    (1.0 - theta) * m.phi(i, j) + theta * m.phi(qi, qj);
                const double len =
                    theta * h * std::exp(0.5 * (m.phi(i, j) + phic));
                de = std::min(de, len);
            };
            if (i > 0) edge(i - 1, j);
            if (i + 1 < nx) edge(i + 1, j);
            if (j > 0) edge(i, j - 1);
            if (j + 1 < ny) edge(i, j + 1);
            if (de == kInf) continue;  // no crossing at this node

            double gx, gy;
            node_gradient(u, i, j, gx, gy);
            const double gm = std::hypot(gx, gy) * std::exp(-m.phi(i, j));
            double dist;
            if (gm >= 0.9 && gm <= 1.1) {
                // the band already carries unit-gradient signed distance;
                // keeping its values bitwise preserves every crossing, so
                // repeated reinitialization cannot erode the interface
                dist = up;
            } else if (gm > 0.1) {
                dist = up / gm;
                // the normalized estimate must stay compatible with the
                // crossing evidence on this edge
                if (dist > de * 2.0 || dist <= 0.0) dist = de;
            } else {
                dist = de;
            }
            d.at(idx) = dist;
            frozen[(size_t)idx] = 1;
        }
    }

    // Away from the interface, values that already satisfy the eikonal
    // equation to 10% are kept as well: a unit-gradient field equals the
    // distance to its own zero set, and rebuilding it with the first-order
    // sweep would inject O(h^2) noise into the flow's curvature stencils,
    // which does not vanish under refinement. The unit-gradient region
    // must connect to the interface through in-window nodes, otherwise a
    // non-distance field whose gradient happens to pass through the window
    // somewhere would freeze garbage.
    std::vector<uint8_t> window((size_t)g.size(), 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int idx = g.index(i, j);
            if (frozen[(size_t)idx]) continue;
            if (freeze_ok && !(*freeze_ok)[(size_t)idx]) continue;
            const double up = u(i, j);
            if (up <= 0.0 || !std::isfinite(up)) continue;
            double gx, gy;
            node_gradient(u, i, j, gx, gy);
            const double gm = std::hypot(gx, gy) * std::exp(-m.phi(i, j));
            if (gm >= 0.9 && gm <= 1.1) window[(size_t)idx] = 1;
        }
    }
    std::deque<int> reach;
    for (int idx = 0; idx < g.size(); ++idx)
        if (frozen[(size_t)idx] && u.at(idx) > 0.0) reach.push_back(idx);
    while (!reach.empty()) {
        const int idx = reach.front();
        reach.pop_front();
        const int i = idx % nx, j = idx / nx;
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const int qi = i + di, qj = j + dj;
                if ((di == 0 && dj == 0) || qi < 0 || qi >= nx || qj < 0 ||
                    qj >= ny)
                    continue;
                const int qq = g.index(qi, qj);
                if (!window[(size_t)qq] || frozen[(size_t)qq]) continue;
                d.at(qq) = u.at(qq);
                frozen[(size_t)qq] = 1;
                reach.push_back(qq);
            }
        }
    }
}

// One-node upwind update with per-edge trapezoidal weights.
double update_value(const double* d, const double* c, const Grid& g, int i,
                    int j) {
    const int nx = g.nx(), ny = g.ny();
    const int idx = g.index(i, j);
    const double cp = c[idx];

    double a = kInf, wa = 0.0;
    if (i > 0 && d[idx - 1] < a) { a = d[idx - 1]; wa = cp * c[idx - 1]; }
    if (i + 1 < nx && d[idx + 1] < a) { a = d[idx + 1]; wa = cp * c[idx + 1]; }
    double b = kInf, wb = 0.0;
    if (j > 0 && d[idx - nx] < b) { b = d[idx - nx]; wb = cp * c[idx - nx]; }
    if (j + 1 < ny && d[idx + nx] < b) { b = d[idx + nx]; wb = cp * c[idx + nx]; }

    double cand = kInf;
    if (a < kInf) cand = a + wa;
    if (b < kInf) cand = std::min(cand, b + wb);
    if (a < kInf && b < kInf) {
        const double A = 1.0 / (wa * wa), B = 1.0 / (wb * wb);
        const double s = A * a + B * b;
        const double disc = s * s - (A + B) * (A * a * a + B * b * b - 1.0);
        if (disc >= 0.0) {
            const double two = (s + std::sqrt(disc)) / (A + B);
            if (two >= a && two >= b) cand = std::min(cand, two);
        }
    }
    return cand;
}

}  // namespace

ScalarField unsigned_distance(const ScalarField& u, const MetricSpec& metric,
                              const std::vector<int>* band,
                              const std::vector<uint8_t>* freeze_ok) {
    const Grid& g = u.grid();
    const int nx = g.nx(), ny = g.ny();
    if (all_positive(u)) throw EmptyRegion("unsigned_distance: region is empty");

    ScalarField dist(g, kInf);
    std::vector<uint8_t> frozen((size_t)g.size(), 0);
    seed(u, metric, dist, frozen, freeze_ok);

    const std::vector<double> c = edge_factors(metric);
    double* d = dist.data().data();
    const double* cf = c.data();

    // Orderings for band sweeps: ascending index = (j asc, i asc).
    std::vector<int> order_a, order_b;
    if (band) {
        order_a = *band;
        std::sort(order_a.begin(), order_a.end());
        order_b = order_a;
        std::sort(order_b.begin(), order_b.end(), [&](int l, int r) {
            const int jl = l / nx, jr = r / nx;
            if (jl != jr) return jl < jr;
            return (l % nx) > (r % nx);
        });
    }

    auto relax_node = [&](int i, int j) {
        const int idx = g.index(i, j);
        if (frozen[(size_t)idx]) return 0.0;
        const double cand = update_value(d, cf, g, i, j);
        if (cand < d[idx]) {
            const double change = (d[idx] == kInf) ? kInf : d[idx] - cand;
            d[idx] = cand;
            return change;
        }
        return 0.0;
    };

    // Monotone min-updates decrease by at least one ulp per change, so the
    // loop reaches an exact fixed point in finitely many sweeps; exactness
    // makes banded and full-grid solves agree bitwise on the band.
    const double tol = 0.0;
    const int max_iter = 4096;
    for (int iter = 0; iter < max_iter; ++iter) {
        double change = 0.0;
        if (!band) {
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) change = std::max(change, relax_node(i, j));
            for (int j = 0; j < ny; ++j)
                for (int i = nx - 1; i >= 0; --i) change = std::max(change, relax_node(i, j));
            for (int j = ny - 1; j >= 0; --j)
                for (int i = 0; i < nx; ++i) change = std::max(change, relax_node(i, j));
            for (int j = ny - 1; j >= 0; --j)
                for (int i = nx - 1; i >= 0; --i) change = std::max(change, relax_node(i, j));
        } else {
            for (auto it = order_a.begin(); it != order_a.end(); ++it)
                change = std::max(change, relax_node(*it % nx, *it / nx));
            for (auto it = order_b.begin(); it != order_b.end(); ++it)
                change = std::max(change, relax_node(*it % nx, *it / nx));
            for (auto it = order_b.rbegin(); it != order_b.rend(); ++it)
                change = std::max(change, relax_node(*it % nx, *it / nx));
            for (auto it = order_a.rbegin(); it != order_a.rend(); ++it)
                change = std::max(change, relax_node(*it % nx, *it / nx));
        }
        if (change <= tol) break;
        if (iter == max_iter - 1)
            throw SolverDiverged("fast sweeping did not reach a fixed point");
    }

    // Edge-Lipschitz relaxation: enforce d(p) <= d(q) + w(p,q) exactly
    // (the sweeping update can overshoot by O(h^2) where phi varies).
    auto lipschitz_node = [&](int i, int j) {
        const int idx = g.index(i, j);
        const double cp = cf[idx];
        double v = d[idx];
        if (i > 0) v = std::min(v, d[idx - 1] + cp * cf[idx - 1]);
        if (i + 1 < nx) v = std::min(v, d[idx + 1] + cp * cf[idx + 1]);
        if (j > 0) v = std::min(v, d[idx - nx] + cp * cf[idx - nx]);
        if (j + 1 < ny) v = std::min(v, d[idx + nx] + cp * cf[idx + nx]);
        if (v < d[idx]) {
            const double change = d[idx] - v;
            d[idx] = v;
            return change;
        }
        return 0.0;
    };
    for (int iter = 0; iter < 1024; ++iter) {
        double change = 0.0;
        if (!band) {
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) change = std::max(change, lipschitz_node(i, j));
            for (int j = ny - 1; j >= 0; --j)
                for (int i = nx - 1; i >= 0; --i) change = std::max(change, lipschitz_node(i, j));
        } else {
            for (auto it = order_a.begin(); it != order_a.end(); ++it)
                change = std::max(change, lipschitz_node(*it % nx, *it / nx));
            for (auto it = order_a.rbegin(); it != order_a.rend(); ++it)
                change = std::max(change, lipschitz_node(*it % nx, *it / nx));
        }
        if (change <= 0.0) break;
    }
    return dist;
}

void node_gradient(const ScalarField& f, int i, int j, double& gx, double& gy) {
    const Grid& g = f.grid();
    const double h = g.h();
    const int il = std::max(i - 1, 0), ir = std::min(i + 1, g.nx() - 1);
    const int jl = std::max(j - 1, 0), jr = std::min(j + 1, g.ny() - 1);
    gx = (f(ir, j) - f(il, j)) / ((ir - il) * h);
    gy = (f(i, jr) - f(i, jl)) / ((jr - jl) * h);
}

}  // namespace detail

DistanceField eikonal_distance(const RegionSet& region, const MetricSpec& metric) {
    if (!region.grid().same_geometry(metric.grid()))
        throw ValidationError("eikonal_distance: region and metric grids differ");
    DistanceField out{detail::unsigned_distance(region.u, metric),
                      std::make_shared<RegionSet>(region)};
    out.d.check_finite("eikonal_distance");
    return out;
}

double set_distance(const RegionSet& a, const RegionSet& b,
                    const MetricSpec& metric) {
    if (all_positive(b.u)) throw EmptyRegion("set_distance: second region empty");
    if (all_nonpositive(b.u)) return 0.0;  // b is everything, so it meets a
    const DistanceField da = eikonal_distance(a, metric);
    double best = std::numeric_limits<double>::infinity();
    for (const Crossing& c : interface_crossings(b.u)) {
        const double d0 = da.d(c.i, c.j);
        const double d1 = c.horizontal ? da.d(c.i + 1, c.j) : da.d(c.i, c.j + 1);
        best = std::min(best, (1.0 - c.theta) * d0 + c.theta * d1);
    }
    return std::max(best, 0.0);
}

OffsetMask offset_region(const DistanceField& dx, const DistanceField& dy,
                         double rho) {
    if (!(rho > 0.0)) throw ValidationError("offset_region: rho must be > 0");
    const Grid& g = dx.grid();
    if (!g.same_geometry(dy.grid()))
        throw ValidationError("offset_region: distance fields on different grids");

    OffsetMask m{g, rho, std::vector<uint8_t>((size_t)g.size(), 0), {}, {}, {}, 0, 0};
    const int nx = g.nx(), ny = g.ny();
    for (int idx = 0; idx < g.size(); ++idx) {
        const double mn = std::min(dx.d.at(idx), dy.d.at(idx));
        if (mn >= rho) {
            m.in_mask[(size_t)idx] = 1;
            ++m.mask_count;
        } else {
            if (dx.d.at(idx) < rho) m.excluded_x.push_back(idx);
            if (dy.d.at(idx) < rho) m.excluded_y.push_back(idx);
        }
    }
    if (m.mask_count == 0)
        throw EmptyOffsetRegion("offset_region: no nodes at distance >= rho");

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int idx = g.index(i, j);
            if (!m.in_mask[(size_t)idx]) continue;
            bool sawx = false, sawy = false;
            auto look = [&](int qi, int qj) {
                const int q = g.index(qi, qj);
                if (m.in_mask[(size_t)q]) return;
                if (dx.d.at(q) < rho) sawx = true;
                if (dy.d.at(q) < rho) sawy = true;
            };
            if (i > 0) look(i - 1, j);
            if (i + 1 < nx) look(i + 1, j);
            if (j > 0) look(i, j - 1);
            if (j + 1 < ny) look(i, j + 1);
            if (!sawx && !sawy) continue;
            BoundaryLabel label = sawx && sawy ? BoundaryLabel::Ambiguous
                                  : sawx       ? BoundaryLabel::XSide
                                               : BoundaryLabel::YSide;
            if (label == BoundaryLabel::Ambiguous) ++m.ambiguous_count;
            const double overshoot =
                std::min(dx.d.at(idx), dy.d.at(idx)) - rho;
            m.boundary.push_back({idx, label, overshoot});
        }
    }
    return m;
}

AlignmentReport foot_direction_alignment(const DistanceField& dx,
                                         const DistanceField& dy,
                                         const MetricSpec& metric,
                                         double delta) {
    if (!(delta > 0.0))
        throw ValidationError("foot_direction_alignment: delta must be > 0");
    const Grid& g = dx.grid();
    if (!g.same_geometry(dy.grid()) || !g.same_geometry(metric.grid()))
        throw ValidationError("foot_direction_alignment: grid mismatch");

    // d(X,Y) realized through grid nodes: min of dX + dY.
    double dsum = std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < g.size(); ++idx)
        dsum = std::min(dsum, dx.d.at(idx) + dy.d.at(idx));
    const double R = 0.5 * dsum;

    AlignmentReport rep;
    rep.band_radius = R;
    double total = 0.0;
    double best_sum = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (std::abs(dx.d(i, j) - R) > 0.5 * delta) continue;
            if (std::abs(dy.d(i, j) - R) > 0.5 * delta) continue;
            double ax, ay, bx, by;
            detail::node_gradient(dx.d, i, j, ax, ay);
            detail::node_gradient(dy.d, i, j, bx, by);
            bx = -bx;
            by = -by;
            const double na = std::hypot(ax, ay), nb = std::hypot(bx, by);
            if (na == 0.0 || nb == 0.0) continue;
            // conformal metrics preserve angles, so the flat angle is the
            // metric angle
            const double cosang =
                std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0);
            const double ang = std::acos(cosang);
            rep.max_angle = std::max(rep.max_angle, ang);
            total += ang;
            ++rep.count;
            if (dx.d(i, j) + dy.d(i, j) < best_sum) {
                best_sum = dx.d(i, j) + dy.d(i, j);
                rep.closest_angle = ang;
            }
        }
    }
    if (rep.count == 0)
        throw NoBandNodes("foot_direction_alignment: empty equidistant band");
    rep.mean_angle = total / rep.count;
    return rep;
}

}  // namespace mcflab
