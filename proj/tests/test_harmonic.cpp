#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mcflab/harmonic.hpp"

using namespace mcflab;

namespace {

RegionSet disk(const Grid& g, double cx, double cy, double r) {
    return region_from_implicit(
        g, [=](double x, double y) { return std::hypot(x - cx, y - cy) - r; });
}

struct StripSetup {
    Grid g;
    MetricSpec m;
    DistanceField dx, dy;
    OffsetMask mask;
};

StripSetup make_strips(int n) {
    Grid g(n, n, -1.6, 1.6, -1.6, 1.6);
    MetricSpec m = make_metric(MetricKind::Euclidean, g);
    RegionSet sx = region_from_implicit(g, [](double x, double) { return x + 1.0; });
    RegionSet sy = region_from_implicit(g, [](double x, double) { return 1.0 - x; });
    DistanceField dx = eikonal_distance(sx, m);
    DistanceField dy = eikonal_distance(sy, m);
    OffsetMask mask = offset_region(dx, dy, 0.5);
    return {g, std::move(m), std::move(dx), std::move(dy), std::move(mask)};
}

// Independent 1D radial oracle: solves (r u')' = 0 on [r0, r1] with a
// dense tridiagonal sweep and returns the radius where u crosses c.
double radial_level_oracle(double r0, double r1, double c) {
    const int n = 4000;
    const double dr = (r1 - r0) / n;
    std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0), cc(n + 1, 0.0), rhs(n + 1, 0.0);
    b[0] = 1.0;
    rhs[0] = 0.0;
    b[n] = 1.0;
    rhs[n] = 1.0;
    for (int k = 1; k < n; ++k) {
        const double rm = r0 + (k - 0.5) * dr, rp = r0 + (k + 0.5) * dr;
        a[k] = rm;
        cc[k] = rp;
        b[k] = -(rm + rp);
    }
    for (int k = 1; k <= n; ++k) {
        const double w = a[k] / b[k - 1];
        b[k] -= w * cc[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    std::vector<double> u(n + 1);
    u[n] = rhs[n] / b[n];
    for (int k = n - 1; k >= 0; --k) u[k] = (rhs[k] - cc[k] * u[k + 1]) / b[k];
    for (int k = 0; k < n; ++k)
        if ((u[k] - c) * (u[k + 1] - c) <= 0.0) {
            const double t = (c - u[k]) / (u[k + 1] - u[k]);
            return r0 + (k + t) * dr;
        }
    return -1.0;
}

}  // namespace

TEST_CASE("strip interpolant is linear") {
    StripSetup s = make_strips(129);
    HarmonicField hf = harmonic_interpolant(s.mask, s.m);
    CHECK(hf.residual <= 1e-10);

    // h = x + 0.5 on the strip |x| <= 0.5
    double worst = 0.0;
    for (int j = 0; j < s.g.ny(); ++j)
        for (int i = 0; i < s.g.nx(); ++i) {
            if (!s.mask.in_mask[(size_t)s.g.index(i, j)]) continue;
            worst = std::max(worst, std::abs(hf.h(i, j) - (s.g.x(i) + 0.5)));
        }
    CHECK(worst <= 2e-3);

    // the centre column value is pinned by symmetry
    const int ci = s.g.nearest_i(0.0);
    for (int j = 4; j < s.g.ny() - 4; j += 8)
        CHECK(hf.h(ci, j) == doctest::Approx(0.5).epsilon(1e-9));

    CHECK(select_regular_value(hf) == 0.5);
}

TEST_CASE("annulus interpolant matches ln r") {
    Grid g(193, 193, -1, 1, -1, 1);
    MetricSpec m = make_metric(MetricKind::Euclidean, g);
    const double s = 0.3;  // annulus [1, e] scaled by s
    const double rin = s, rout = s * M_E;
    // sources sit 3h from the mask rims: the eikonal fields are then in
    // their subcell-accurate zone where the rim lands
    const double rho = 3 * g.h();
    DistanceField dx = eikonal_distance(disk(g, 0, 0, rin - rho), m);
    DistanceField dy = eikonal_distance(
        region_from_implicit(
            g, [=](double x, double y) { return (rout + rho) - std::hypot(x, y); }),
        m);
    OffsetMask mask = offset_region(dx, dy, rho);
    HarmonicField hf = harmonic_interpolant(mask, m);

    double worst = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!mask.in_mask[(size_t)g.index(i, j)]) continue;
            const double r = std::hypot(g.x(i), g.y(j));
            worst = std::max(worst, std::abs(hf.h(i, j) - std::log(r / rin)));
        }
    CHECK(worst <= 5e-3);

    // value at the geometric-mean radius r = s e^{1/2}
    const double rmid = s * std::exp(0.5);
    CHECK(hf.h.interp(rmid, 0.0) == doctest::Approx(0.5).epsilon(5e-3));
    CHECK(hf.h.interp(0.0, -rmid) == doctest::Approx(0.5).epsilon(5e-3));

    CHECK(select_regular_value(hf) == 0.5);

    // discrete maximum principle and the mean value property
    for (int j = 1; j < g.ny() - 1; ++j)
        for (int i = 1; i < g.nx() - 1; ++i) {
            const int idx = g.index(i, j);
            if (!mask.in_mask[(size_t)idx]) continue;
            CHECK(hf.h.at(idx) >= 0.0);
            CHECK(hf.h.at(idx) <= 1.0);
            bool interior = true;
            for (int d : {g.index(i - 1, j), g.index(i + 1, j), g.index(i, j - 1),
                          g.index(i, j + 1)})
                interior = interior && mask.in_mask[(size_t)d];
            if (interior) {
                const double avg = 0.25 * (hf.h(i - 1, j) + hf.h(i + 1, j) +
                                           hf.h(i, j - 1) + hf.h(i, j + 1));
                CHECK(std::abs(avg - hf.h(i, j)) <= 1e-10);
            }
        }
}

TEST_CASE("degenerate plateau has no regular value") {
    StripSetup s = make_strips(65);
    HarmonicField hf = harmonic_interpolant(s.mask, s.m);
    for (int idx = 0; idx < s.g.size(); ++idx)
        if (s.mask.in_mask[(size_t)idx]) hf.h.at(idx) = 0.4;
    CHECK_THROWS_AS(select_regular_value(hf), NoRegularValue);
}

TEST_CASE("missing boundary class is rejected") {
    StripSetup s = make_strips(65);
    OffsetMask broken = s.mask;
    for (auto& b : broken.boundary)
        if (b.label == BoundaryLabel::YSide) b.label = BoundaryLabel::XSide;
    CHECK_THROWS_AS(harmonic_interpolant(broken, s.m), MissingBoundaryClass);
}

TEST_CASE("unreachable mask component is rejected") {
    StripSetup s = make_strips(65);
    OffsetMask broken = s.mask;
    const Grid& g = s.g;
    for (int idx = 0; idx < g.size(); ++idx) broken.in_mask[(size_t)idx] = 0;
    broken.boundary.clear();
    broken.mask_count = 0;
    auto put = [&](int i, int j) {
        broken.in_mask[(size_t)g.index(i, j)] = 1;
        ++broken.mask_count;
    };
    put(10, 10);
    put(11, 10);
    put(40, 40);  // island, never labeled
    broken.boundary.push_back({g.index(10, 10), BoundaryLabel::XSide, 0.0});
    broken.boundary.push_back({g.index(11, 10), BoundaryLabel::YSide, 0.0});
    CHECK_THROWS_AS(harmonic_interpolant(broken, s.m), MissingBoundaryClass);
}

TEST_CASE("two-disk midsurface is the midline") {
    Grid g(161, 161, -1.6, 1.6, -1.6, 1.6);
    MetricSpec m = make_metric(MetricKind::Euclidean, g);
    const double h = g.h();
    RegionSet X = disk(g, -1, 0, 0.25);
    RegionSet Y = disk(g, 1, 0, 0.25);
    DistanceField dx = eikonal_distance(X, m);
    DistanceField dy = eikonal_distance(Y, m);
    const double R = set_distance(X, Y, m) / 2.0;
    const double rho = R - 3 * h;
    OffsetMask mask = offset_region(dx, dy, rho);
    HarmonicField hf = harmonic_interpolant(mask, m);
    const double c = select_regular_value(hf);
    Midsurface ms = extract_midsurface(hf, c, dx, rho, m);

    // Sigma stays within one cell of the exact midline x = 0
    for (const Crossing& cr : interface_crossings(ms.sigma.u)) {
        double x, y;
        crossing_point(g, cr, x, y);
        CHECK(std::abs(x) <= h);
        (void)y;
    }

    // d(X, Sigma) and d(Y, Sigma) at least rho (up to interface error)
    CHECK(set_distance(X, ms.sigma, m) >= rho - 2 * h);
    CHECK(set_distance(Y, ms.sigma, m) >= rho - 2 * h);

    // midsurface sandwich
    for (const auto& bn : ms.band) {
        CHECK(dx.d.at(bn.idx) >= rho - h);
        CHECK(dy.d.at(bn.idx) >= rho - h);
        CHECK(std::hypot(bn.nux, bn.nuy) == doctest::Approx(1.0).epsilon(1e-12));
    }

    // every Sigma crossing node lies in the mask or adjacent to it
    for (const Crossing& cr : interface_crossings(ms.sigma.u)) {
        auto near_mask = [&](int i, int j) {
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= g.nx() || jj < 0 || jj >= g.ny()) continue;
                    if (mask.in_mask[(size_t)g.index(ii, jj)]) return true;
                }
            return false;
        };
        CHECK(near_mask(cr.i, cr.j));
    }

    // uniform C1 diagnostics near the mask boundary
    C1Report c1 = uniform_c1_check(ms, dx, dy, 5 * h);
    CHECK(c1.node_count > 0);
    CHECK(c1.min_grad > 1e-4 / g.diameter());
    CHECK(c1.max_angle <= 0.4);  // 0.2 rad is certified at 256^2
}

TEST_CASE("concentric midsurface sits at the radial harmonic level") {
    Grid g(161, 161, -1, 1, -1, 1);
    MetricSpec m = make_metric(MetricKind::Euclidean, g);
    const double h = g.h();
    RegionSet X = disk(g, 0, 0, 0.3);
    RegionSet Y = region_from_implicit(
        g, [](double x, double y) { return 0.8 - std::hypot(x, y); });
    DistanceField dx = eikonal_distance(X, m);
    DistanceField dy = eikonal_distance(Y, m);
    const double R = set_distance(X, Y, m) / 2.0;
    const double rho = R - 3 * h;
    OffsetMask mask = offset_region(dx, dy, rho);
    HarmonicField hf = harmonic_interpolant(mask, m);
    const double c = select_regular_value(hf);
    Midsurface ms = extract_midsurface(hf, c, dx, rho, m);

    const double r_lo = 0.3 + rho, r_hi = 0.8 - rho;
    const double r_expect = radial_level_oracle(r_lo, r_hi, c);
    REQUIRE(r_expect > 0.0);
    for (const Crossing& cr : interface_crossings(ms.sigma.u)) {
        double x, y;
        crossing_point(g, cr, x, y);
        const double r = std::hypot(x, y);
        CHECK(r >= r_lo - h);
        CHECK(r <= r_hi + h);
        CHECK(std::abs(r - r_expect) <= 2 * h);
    }
}

TEST_CASE("point-vs-line midsurface tracks the equidistant parabola") {
    Grid g(161, 161, -2, 2, -2, 2);
    MetricSpec m = make_metric(MetricKind::Euclidean, g);
    const double h = g.h();
    RegionSet X = disk(g, 0, 1.4, 0.2);
    RegionSet Y = region_from_implicit(g, [](double, double y) { return y + 0.6; });
    DistanceField dx = eikonal_distance(X, m);
    DistanceField dy = eikonal_distance(Y, m);
    const double R = set_distance(X, Y, m) / 2.0;
    const double rho = R - 3 * h;
    OffsetMask mask = offset_region(dx, dy, rho);
    HarmonicField hf = harmonic_interpolant(mask, m);
    const double c = select_regular_value(hf);
    Midsurface ms = extract_midsurface(hf, c, dx, rho, m);

    // brute-force equidistant check with analytic distances: near the
    // pinch (where dX + dY is close to 2R) Sigma stays within the band
    // width of the parabola; away from it the offset rims diverge and the
    // level set is no longer forced
    const double band = 2 * (R - rho) + 2 * h;
    int covered = 0;
    for (const Crossing& cr : interface_crossings(ms.sigma.u)) {
        double x, y;
        crossing_point(g, cr, x, y);
        const double ddx = std::hypot(x - 0.0, y - 1.4) - 0.2;
        const double ddy = y + 0.6;
        if (ddx + ddy > 2 * R + 2 * (R - rho)) continue;
        CHECK(std::abs(ddx - ddy) <= band);
        ++covered;
    }
    CHECK(covered > 0);
}

TEST_CASE("strip midsurface has exactly constant normals") {
    StripSetup s = make_strips(129);
    HarmonicField hf = harmonic_interpolant(s.mask, s.m);
    const double c = select_regular_value(hf);
    Midsurface ms = extract_midsurface(hf, c, s.dx, 0.5, s.m);
    C1Report rep = uniform_c1_check(ms, s.dx, s.dy, 0.6);
    CHECK(rep.node_count > 0);
    CHECK(rep.max_angle <= 1e-9);
    CHECK(rep.min_grad > 0.0);
}

TEST_CASE("sigma converges to the equidistant set as rho -> R") {
    // asymmetric disks so the midsurface genuinely differs from the
    // equidistant set at finite band width
    auto hausdorff = [](int n) {
        Grid g(n, n, -1.6, 1.6, -1.6, 1.6);
        MetricSpec m = make_metric(MetricKind::Euclidean, g);
        const double h = g.h();
        RegionSet X = disk(g, -1, 0, 0.2);
        RegionSet Y = disk(g, 1, 0.1, 0.45);
        DistanceField dx = eikonal_distance(X, m);
        DistanceField dy = eikonal_distance(Y, m);
        const double R = set_distance(X, Y, m) / 2.0;
        const double rho = R - 3 * h;
        OffsetMask mask = offset_region(dx, dy, rho);
        HarmonicField hf = harmonic_interpolant(mask, m);
        const double c = select_regular_value(hf);
        Midsurface ms = extract_midsurface(hf, c, dx, rho, m);

        // one-sided Hausdorff between Sigma and the |dX - dY| <= h node
        // set, both restricted to the pinch zone where the band pins them
        const double zone = 2 * R + 2 * (R - rho);
        std::vector<std::pair<double, double>> equi;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (std::abs(dx.d(i, j) - dy.d(i, j)) <= h &&
                    dx.d(i, j) + dy.d(i, j) <= zone &&
                    mask.in_mask[(size_t)g.index(i, j)])
                    equi.push_back({g.x(i), g.y(j)});
        REQUIRE(!equi.empty());
        double worst = 0.0;
        for (const Crossing& cr : interface_crossings(ms.sigma.u)) {
            double x, y;
            crossing_point(g, cr, x, y);
            if (dx.d.interp(x, y) + dy.d.interp(x, y) > zone) continue;
            double best = 1e300;
            for (const auto& [ex, ey] : equi)
                best = std::min(best, std::hypot(x - ex, y - ey));
            worst = std::max(worst, best);
        }
        return worst;
    };
    const double hc = hausdorff(97);
    const double hf = hausdorff(193);
    CHECK(hf < hc);
    CHECK(hc / hf >= 1.3);
    CHECK(hc / hf <= 3.5);
}
