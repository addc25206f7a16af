#include "mcflab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcflab/expr.hpp"

namespace mcflab {

namespace {

void fill_derived(MetricSpec& m) {
    const Grid& g = m.grid();
    const int nx = g.nx(), ny = g.ny();
    const double h = g.h();
    m.max_inv_e2phi = 0.0;
    m.max_e_phi = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double p = m.phi(i, j);
            m.inv_e2phi(i, j) = std::exp(-2.0 * p);
            m.e_phi(i, j) = std::exp(p);
            m.max_inv_e2phi = std::max(m.max_inv_e2phi, m.inv_e2phi(i, j));
            m.max_e_phi = std::max(m.max_e_phi, m.e_phi(i, j));
            // central differences, one-sided on the box boundary
            const int il = std::max(i - 1, 0), ir = std::min(i + 1, nx - 1);
            const int jl = std::max(j - 1, 0), jr = std::min(j + 1, ny - 1);
            m.phi_x(i, j) = (m.phi(ir, j) - m.phi(il, j)) / ((ir - il) * h);
            m.phi_y(i, j) = (m.phi(i, jr) - m.phi(i, jl)) / ((jr - jl) * h);
        }
    }
    m.phi.check_finite("make_metric phi");
    m.inv_e2phi.check_finite("make_metric conformal factor");
}

}  // namespace

MetricSpec make_metric(MetricKind kind, const Grid& grid,
                       const std::string& phi_expression) {
    MetricSpec m(grid);
    m.kind = kind;
    switch (kind) {
        case MetricKind::Euclidean:
            m.lambda_lower = 0.0;
            break;
        case MetricKind::PoincareDisk: {
            const double rc = std::hypot(
                std::max(std::abs(grid.xmin()), std::abs(grid.xmax())),
                std::max(std::abs(grid.ymin()), std::abs(grid.ymax())));
            if (rc >= 1.0)
                throw DomainOutsideChart(
                    "PoincareDisk domain must lie strictly inside the unit disk "
                    "(corner radius " + std::to_string(rc) + ")");
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i) {
                    const double r2 = grid.x(i) * grid.x(i) + grid.y(j) * grid.y(j);
                    m.phi(i, j) = std::log(2.0 / (1.0 - r2));
                }
            m.lambda_lower = -1.0;
            break;
        }
        case MetricKind::CustomConformal: {
            Expr e(phi_expression);
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i)
                    m.phi(i, j) = e.eval(grid.x(i), grid.y(j));
            break;
        }
    }
    fill_derived(m);
    if (kind == MetricKind::CustomConformal)
        m.lambda_lower = discrete_ricci_min(m);
    return m;
}

double discrete_gauss_curvature(const MetricSpec& m, int i, int j) {
    const Grid& g = m.grid();
    const double h = g.h();
    const double lap = (m.phi(i + 1, j) + m.phi(i - 1, j) + m.phi(i, j + 1) +
                        m.phi(i, j - 1) - 4.0 * m.phi(i, j)) /
                       (h * h);
    return -m.inv_e2phi(i, j) * lap;
}

double discrete_ricci_min(const MetricSpec& m) {
    const Grid& g = m.grid();
    double kmin = std::numeric_limits<double>::infinity();
    for (int j = 1; j < g.ny() - 1; ++j)
        for (int i = 1; i < g.nx() - 1; ++i)
            kmin = std::min(kmin, discrete_gauss_curvature(m, i, j));
    return kmin;
}

double ricci_lower_bound(const MetricSpec& m) {
    switch (m.kind) {
        case MetricKind::Euclidean: return 0.0;
        case MetricKind::PoincareDisk: return -1.0;
        case MetricKind::CustomConformal: return discrete_ricci_min(m);
    }
    return 0.0;
}

double metric_edge_length(const MetricSpec& m, int i0, int j0, int i1, int j1) {
    const Grid& g = m.grid();
    const double flat = std::hypot((i1 - i0) * g.h(), (j1 - j0) * g.h());
    return flat * std::exp(0.5 * (m.phi(i0, j0) + m.phi(i1, j1)));
}

MetricKind metric_kind_from_name(const std::string& name) {
    if (name == "euclidean") return MetricKind::Euclidean;
    if (name == "poincare_disk") return MetricKind::PoincareDisk;
    if (name == "custom_conformal") return MetricKind::CustomConformal;
    throw UnsupportedKind("metric kind '" + name + "'");
}

std::string metric_kind_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::Euclidean: return "euclidean";
        case MetricKind::PoincareDisk: return "poincare_disk";
        case MetricKind::CustomConformal: return "custom_conformal";
    }
    return "euclidean";
}

}  // namespace mcflab
