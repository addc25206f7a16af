#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcflab/expr.hpp"
#include "mcflab/metric.hpp"

using namespace mcflab;

namespace {

// Independent finite-difference curvature oracle: samples phi itself and
// evaluates K = -e^{-2 phi} * Laplacian(phi) without touching MetricSpec
// internals.
double fd_curvature_oracle(double (*phi)(double, double), double x, double y,
                           double h) {
    const double lap = (phi(x + h, y) + phi(x - h, y) + phi(x, y + h) +
                        phi(x, y - h) - 4.0 * phi(x, y)) /
                       (h * h);
    return -std::exp(-2.0 * phi(x, y)) * lap;
}

double phi_poincare(double x, double y) {
    return std::log(2.0 / (1.0 - (x * x + y * y)));
}
double phi_sphere(double x, double y) {
    return std::log(2.0 / (1.0 + (x * x + y * y)));
}

}  // namespace

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid(8, 32, 0, 1, 0, 1), ValidationError);
    CHECK_THROWS_AS(Grid(32, 32, 0, 1, 0, 2), ValidationError);  // unequal spacing

    Grid g(33, 65, -1.0, 1.0, -2.0, 2.0);
    CHECK(g.h() == doctest::Approx(2.0 / 32).epsilon(1e-15));

    // coordinate round-trip is exact for every node
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            CHECK(g.nearest_i(g.x(i)) == i);
            CHECK(g.nearest_j(g.y(j)) == j);
        }
}

TEST_CASE("scalar field finite check") {
    Grid g(16, 16, 0, 1, 0, 1);
    ScalarField f(g, 1.0);
    CHECK_NOTHROW(f.check_finite("test"));
    f(3, 3) = std::nan("");
    CHECK_THROWS_AS(f.check_finite("test"), ValidationError);
}

TEST_CASE("expression parser") {
    Expr e("2*x + y^2 - sin(pi/2)");
    CHECK(e.eval(1.5, 2.0) == doctest::Approx(3.0 + 4.0 - 1.0));
    Expr r("log(2/(1 - r^2))");
    CHECK(r.eval(0.3, 0.4) == doctest::Approx(std::log(2.0 / 0.75)));
    CHECK_THROWS_AS(Expr("2 +* x"), ParseError);
    CHECK_THROWS_AS(Expr("nope(x)"), ParseError);
}

TEST_CASE("euclidean metric") {
    Grid g(32, 32, -1, 1, -1, 1);
    MetricSpec m = make_metric(MetricKind::Euclidean, g);
    CHECK(ricci_lower_bound(m) == 0.0);
    CHECK(m.lambda_lower == 0.0);
    CHECK(m.phi(5, 7) == 0.0);
    // horizontal neighbours are h apart
    CHECK(metric_edge_length(m, 3, 4, 4, 4) == doctest::Approx(g.h()));
}

TEST_CASE("poincare disk metric") {
    Grid g(65, 65, -0.6, 0.6, -0.6, 0.6);
    MetricSpec m = make_metric(MetricKind::PoincareDisk, g);
    CHECK(ricci_lower_bound(m) == -1.0);

    // discrete curvature approaches -1 with the independent FD oracle
    const double k_oracle = fd_curvature_oracle(phi_poincare, 0.25, 0.1, g.h());
    CHECK(k_oracle == doctest::Approx(-1.0).epsilon(1e-3));
    // O(h^2) error at this resolution
    CHECK(discrete_ricci_min(m) == doctest::Approx(-1.0).epsilon(5e-3));
    Grid gf(257, 257, -0.6, 0.6, -0.6, 0.6);
    CHECK(discrete_ricci_min(make_metric(MetricKind::PoincareDisk, gf)) ==
          doctest::Approx(-1.0).epsilon(1e-3));

    // domain touching the chart boundary is rejected
    CHECK_THROWS_AS(make_metric(MetricKind::PoincareDisk,
                                Grid(32, 32, -0.8, 0.8, -0.8, 0.8)),
                    DomainOutsideChart);

    // factor at the origin is 2: neighbours straddling 0 are about 2h apart
    Grid g2(65, 65, -0.64, 0.64, -0.64, 0.64);  // even spacing across 0
    MetricSpec m2 = make_metric(MetricKind::PoincareDisk, g2);
    const int i0 = 31, i1 = 32;  // nodes at -h/2 and +h/2 around x=0? not exact
    const double len = metric_edge_length(m2, i0, 32, i1, 32);
    CHECK(len / g2.h() == doctest::Approx(2.0).epsilon(5e-3));
}

TEST_CASE("custom conformal metrics") {
    Grid g(65, 65, -0.6, 0.6, -0.6, 0.6);

    // stereographic sphere: K = +1
    MetricSpec sphere = make_metric(MetricKind::CustomConformal, g,
                                    "log(2/(1 + r^2))");
    CHECK(sphere.lambda_lower == doctest::Approx(1.0).epsilon(1e-3));
    const double k_oracle = fd_curvature_oracle(phi_sphere, -0.2, 0.35, g.h());
    CHECK(k_oracle == doctest::Approx(1.0).epsilon(1e-3));

    // linear exponent: Laplacian(phi) = 0 exactly in second differences
    MetricSpec flatk = make_metric(MetricKind::CustomConformal, g, "x");
    CHECK(std::abs(flatk.lambda_lower) < 1e-10);

    // constant scaling phi = ln 3: edges are 3h
    MetricSpec scaled = make_metric(MetricKind::CustomConformal, g, "log(3)");
    CHECK(metric_edge_length(scaled, 10, 10, 10, 11) ==
          doctest::Approx(3.0 * g.h()).epsilon(1e-12));

    // lower bound really is a lower bound at every interior node
    for (int j = 1; j < g.ny() - 1; ++j)
        for (int i = 1; i < g.nx() - 1; ++i)
            CHECK(sphere.lambda_lower <=
                  discrete_gauss_curvature(sphere, i, j) + 1e-15);
}

TEST_CASE("ricci bound refinement converges at second order") {
    // halving h changes the discrete Poincare minimum by ~4x less each time
    auto discrete_min = [](int n) {
        Grid g(n, n, -0.6, 0.6, -0.6, 0.6);
        return discrete_ricci_min(make_metric(MetricKind::PoincareDisk, g));
    };
    const double k1 = discrete_min(65);
    const double k2 = discrete_min(129);
    const double k3 = discrete_min(257);
    const double change1 = std::abs(k2 - k1);
    const double change2 = std::abs(k3 - k2);
    const double ratio = change1 / change2;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}
