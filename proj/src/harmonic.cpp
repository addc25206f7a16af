#include "mcflab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "mcflab/flow.hpp"

namespace mcflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gradient of h restricted to mask nodes; one-sided where a neighbor
// leaves the mask, zero component if no neighbor is available.
void mask_gradient(const ScalarField& h, const OffsetMask& m, int i, int j,
                   double& gx, double& gy) {
    const Grid& g = h.grid();
    const double hh = g.h();
    auto in = [&](int a, int b) {
        return a >= 0 && a < g.nx() && b >= 0 && b < g.ny() &&
               m.in_mask[(size_t)g.index(a, b)];
    };
    gx = 0.0;
    if (in(i - 1, j) && in(i + 1, j)) gx = (h(i + 1, j) - h(i - 1, j)) / (2 * hh);
    else if (in(i + 1, j)) gx = (h(i + 1, j) - h(i, j)) / hh;
    else if (in(i - 1, j)) gx = (h(i, j) - h(i - 1, j)) / hh;
    gy = 0.0;
    if (in(i, j - 1) && in(i, j + 1)) gy = (h(i, j + 1) - h(i, j - 1)) / (2 * hh);
    else if (in(i, j + 1)) gy = (h(i, j + 1) - h(i, j)) / hh;
    else if (in(i, j - 1)) gy = (h(i, j) - h(i, j - 1)) / hh;
}

struct LaplaceSystem {
    const OffsetMask* mask;
    const Grid* grid;
    std::vector<int> unknowns;      // node index per equation
    std::vector<int> eq_of_node;    // -1 = not an unknown
    std::vector<double> dirichlet;  // value per node (only labeled nodes)
    std::vector<uint8_t> is_dirichlet;

    // (A x)_p = deg(p) x_p - sum_{q unknown neighbor} x_q
    void apply(const std::vector<double>& x, std::vector<double>& out) const {
        const Grid& g = *grid;
        const int nx = g.nx(), ny = g.ny();
        for (size_t e = 0; e < unknowns.size(); ++e) {
            const int idx = unknowns[e];
            const int i = idx % nx, j = idx / nx;
            double acc = 0.0;
            int deg = 0;
            auto nb = [&](int qi, int qj) {
                if (qi < 0 || qi >= nx || qj < 0 || qj >= ny) return;
                const int q = g.index(qi, qj);
                if (!mask->in_mask[(size_t)q]) return;
                ++deg;
                const int qe = eq_of_node[(size_t)q];
                if (qe >= 0) acc += x[(size_t)qe];
            };
            nb(i - 1, j);
            nb(i + 1, j);
            nb(i, j - 1);
            nb(i, j + 1);
            out[e] = deg * x[e] - acc;
        }
    }

    std::vector<double> rhs() const {
        const Grid& g = *grid;
        const int nx = g.nx(), ny = g.ny();
        std::vector<double> b(unknowns.size(), 0.0);
        for (size_t e = 0; e < unknowns.size(); ++e) {
            const int idx = unknowns[e];
            const int i = idx % nx, j = idx / nx;
            auto nb = [&](int qi, int qj) {
                if (qi < 0 || qi >= nx || qj < 0 || qj >= ny) return;
                const int q = g.index(qi, qj);
                if (!mask->in_mask[(size_t)q]) return;
                if (is_dirichlet[(size_t)q]) b[e] += dirichlet[(size_t)q];
            };
            nb(i - 1, j);
            nb(i + 1, j);
            nb(i, j - 1);
            nb(i, j + 1);
        }
        return b;
    }
};

// Plain conjugate gradient, fixed-order reductions, max-norm stop.
void solve_cg(const LaplaceSystem& sys, std::vector<double>& x) {
    const size_t n = sys.unknowns.size();
    if (n == 0) return;
    std::vector<double> b = sys.rhs();
    std::vector<double> r(n), p(n), ap(n);
    sys.apply(x, ap);
    double rmax = 0.0, rr = 0.0;
    for (size_t k = 0; k < n; ++k) {
        r[k] = b[k] - ap[k];
        rr += r[k] * r[k];
        rmax = std::max(rmax, std::abs(r[k]));
    }
    p = r;
    const double tol = 5e-11;
    const size_t max_iter = 40 * (size_t)std::sqrt((double)n) + 8000;
    for (size_t it = 0; it < max_iter && rmax > tol; ++it) {
        sys.apply(p, ap);
        double pap = 0.0;
        for (size_t k = 0; k < n; ++k) pap += p[k] * ap[k];
        if (pap <= 0.0) throw SolverDiverged("CG hit a non-positive curvature");
        const double alpha = rr / pap;
        double rr_new = 0.0;
        rmax = 0.0;
        for (size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
            rr_new += r[k] * r[k];
            rmax = std::max(rmax, std::abs(r[k]));
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
        // recurrence residual drifts; refresh periodically
        if ((it + 1) % 256 == 0) {
            sys.apply(x, ap);
            rr = 0.0;
            rmax = 0.0;
            for (size_t k = 0; k < n; ++k) {
                r[k] = b[k] - ap[k];
                rr += r[k] * r[k];
                rmax = std::max(rmax, std::abs(r[k]));
            }
            p = r;
        }
    }
    if (rmax > tol)
        throw SolverDiverged("CG failed to reach residual tolerance");
}

}  // namespace

HarmonicField harmonic_interpolant(const OffsetMask& mask,
                                   const MetricSpec& metric) {
    const Grid& g = mask.grid;
    if (!g.same_geometry(metric.grid()))
        throw ValidationError("harmonic_interpolant: grid mismatch");
    if (mask.mask_count == 0)
        throw EmptyOffsetRegion("harmonic_interpolant: empty mask");

    bool have0 = false, have1 = false;
    for (const auto& b : mask.boundary) {
        if (b.label == BoundaryLabel::XSide) have0 = true;
        if (b.label == BoundaryLabel::YSide) have1 = true;
    }
    if (!have0 || !have1)
        throw MissingBoundaryClass(
            "harmonic_interpolant: need boundary nodes of both classes");

    LaplaceSystem sys;
    sys.mask = &mask;
    sys.grid = &g;
    sys.eq_of_node.assign((size_t)g.size(), -1);
    sys.dirichlet.assign((size_t)g.size(), 0.0);
    sys.is_dirichlet.assign((size_t)g.size(), 0);
    for (const auto& b : mask.boundary) {
        if (b.label == BoundaryLabel::XSide) {
            sys.is_dirichlet[(size_t)b.idx] = 1;
            sys.dirichlet[(size_t)b.idx] = 0.0;
        } else if (b.label == BoundaryLabel::YSide) {
            sys.is_dirichlet[(size_t)b.idx] = 1;
            sys.dirichlet[(size_t)b.idx] = 1.0;
        }
        // ambiguous boundary nodes stay unknowns (excluded from Dirichlet
        // data per the offset-region contract)
    }
    for (int idx = 0; idx < g.size(); ++idx) {
        if (mask.in_mask[(size_t)idx] && !sys.is_dirichlet[(size_t)idx]) {
            sys.eq_of_node[(size_t)idx] = (int)sys.unknowns.size();
            sys.unknowns.push_back(idx);
        }
    }

    // Every connected component of unknowns must reach Dirichlet data,
    // otherwise its equations are pure-Neumann singular.
    {
        std::vector<uint8_t> reached((size_t)g.size(), 0);
        std::deque<int> q;
        for (int idx = 0; idx < g.size(); ++idx)
            if (sys.is_dirichlet[(size_t)idx]) {
                reached[(size_t)idx] = 1;
                q.push_back(idx);
            }
        const int nx = g.nx(), ny = g.ny();
        while (!q.empty()) {
            const int idx = q.front();
            q.pop_front();
            const int i = idx % nx, j = idx / nx;
            auto visit = [&](int qi, int qj) {
                if (qi < 0 || qi >= nx || qj < 0 || qj >= ny) return;
                const int qq = g.index(qi, qj);
                if (!mask.in_mask[(size_t)qq] || reached[(size_t)qq]) return;
                reached[(size_t)qq] = 1;
                q.push_back(qq);
            };
            visit(i - 1, j);
            visit(i + 1, j);
            visit(i, j - 1);
            visit(i, j + 1);
        }
        for (int idx : sys.unknowns)
            if (!reached[(size_t)idx])
                throw MissingBoundaryClass(
                    "harmonic_interpolant: a mask component touches no labeled "
                    "boundary (only ambiguous or isolated nodes)");
    }

    auto run_solve = [&](HarmonicField& out) {
        std::vector<double> x(sys.unknowns.size(), 0.5);
        solve_cg(sys, x);
        out.h = ScalarField(g, 0.0);
        for (int idx = 0; idx < g.size(); ++idx)
            if (sys.is_dirichlet[(size_t)idx])
                out.h.at(idx) = sys.dirichlet[(size_t)idx];
        for (size_t e = 0; e < sys.unknowns.size(); ++e)
            out.h.at(sys.unknowns[e]) = x[e];
    };

    HarmonicField hf{mask, ScalarField(g, 0.0), 0.0};
    hf.rho = mask.rho;
    run_solve(hf);

    // Correction passes: the labeled nodes sit up to O(h) past the rho
    // contour, so pin them to the linearized boundary value
    // |grad h| * overshoot instead of exactly 0/1. The gradient estimate
    // itself improves once the pins carry the offset, so iterate to a
    // fixed point. This removes the O(h) boundary-placement bias while
    // keeping the plain 5-point stencil.
    for (int pass = 0; pass < 4; ++pass) {
        double worst_change = 0.0;
        for (const auto& b : mask.boundary) {
            if (b.label == BoundaryLabel::Ambiguous || b.overshoot <= 0.0)
                continue;
            const int i = b.idx % g.nx(), j = b.idx / g.nx();
            double gx, gy;
            mask_gradient(hf.h, mask, i, j, gx, gy);
            const double step = std::min(b.overshoot * std::hypot(gx, gy), 0.5);
            const double value =
                b.label == BoundaryLabel::XSide ? step : 1.0 - step;
            worst_change =
                std::max(worst_change,
                         std::abs(value - sys.dirichlet[(size_t)b.idx]));
            sys.dirichlet[(size_t)b.idx] = value;
        }
        if (worst_change <= 1e-5) break;
        run_solve(hf);
    }

    // Discrete maximum principle; CG noise beyond it means trouble.
    for (int idx = 0; idx < g.size(); ++idx) {
        if (!mask.in_mask[(size_t)idx]) continue;
        double& v = hf.h.at(idx);
        if (v < -1e-8 || v > 1.0 + 1e-8)
            throw SolverDiverged("harmonic_interpolant: maximum principle violated");
        v = std::clamp(v, 0.0, 1.0);
    }

    // Interior residual in max norm (full-stencil mask nodes only).
    const int nx = g.nx(), ny = g.ny();
    double res = 0.0;
    for (int j = 1; j < ny - 1; ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            const int idx = g.index(i, j);
            if (sys.eq_of_node[(size_t)idx] < 0) continue;
            if (!mask.in_mask[(size_t)g.index(i - 1, j)] ||
                !mask.in_mask[(size_t)g.index(i + 1, j)] ||
                !mask.in_mask[(size_t)g.index(i, j - 1)] ||
                !mask.in_mask[(size_t)g.index(i, j + 1)])
                continue;
            const double r = hf.h(i - 1, j) + hf.h(i + 1, j) + hf.h(i, j - 1) +
                             hf.h(i, j + 1) - 4.0 * hf.h(i, j);
            res = std::max(res, std::abs(r));
        }
    }
    hf.residual = res;
    hf.h.check_finite("harmonic_interpolant");
    return hf;
}

namespace {

// Minimum |grad h| over the discrete band of level c; -inf if the band is
// empty (level absent from the mask).
double band_min_grad(const HarmonicField& hf, double c, double band_halfwidth) {
    const Grid& g = hf.grid();
    double mn = kInf;
    bool any = false;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const int idx = g.index(i, j);
            if (!hf.mask.in_mask[(size_t)idx]) continue;
            if (std::abs(hf.h.at(idx) - c) > band_halfwidth) continue;
            double gx, gy;
            mask_gradient(hf.h, hf.mask, i, j, gx, gy);
            mn = std::min(mn, std::hypot(gx, gy));
            any = true;
        }
    }
    return any ? mn : -kInf;
}

}  // namespace

double select_regular_value(const HarmonicField& hf) {
    const Grid& g = hf.grid();
    double gmax = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!hf.mask.in_mask[(size_t)g.index(i, j)]) continue;
            double gx, gy;
            mask_gradient(hf.h, hf.mask, i, j, gx, gy);
            gmax = std::max(gmax, std::hypot(gx, gy));
        }
    const double band_halfwidth = 2.0 * g.h() * gmax;
    const double g_min = 1e-4 / g.diameter();

    const double half = band_min_grad(hf, 0.5, band_halfwidth);
    if (half > g_min) return 0.5;

    double best_c = 0.0, best = -kInf;
    for (int k = 0; k <= 16; ++k) {
        const double c = 1.0 / 3.0 + k / 48.0;
        const double v = band_min_grad(hf, c, band_halfwidth);
        if (v > best) {
            best = v;
            best_c = c;
        }
    }
    if (best <= g_min)
        throw NoRegularValue("select_regular_value: no candidate level has a "
                             "gradient floor above threshold");
    return best_c;
}

Midsurface extract_midsurface(const HarmonicField& hf, double c,
                              const DistanceField& dx, double rho,
                              const MetricSpec& metric) {
    const Grid& g = hf.grid();
    if (!g.same_geometry(dx.grid()) || !g.same_geometry(metric.grid()))
        throw ValidationError("extract_midsurface: grid mismatch");

    // Omega = {h <= c} union {dX <= rho}; h extended by its boundary
    // limits outside the mask.
    ScalarField omega(g, 0.0);
    std::vector<uint8_t> ex((size_t)g.size(), 0), ey((size_t)g.size(), 0);
    for (int idx : hf.mask.excluded_x) ex[(size_t)idx] = 1;
    for (int idx : hf.mask.excluded_y) ey[(size_t)idx] = 1;
    for (int idx = 0; idx < g.size(); ++idx) {
        double hv;
        if (hf.mask.in_mask[(size_t)idx]) hv = hf.h.at(idx);
        else if (ex[(size_t)idx] && ey[(size_t)idx]) hv = 0.5;
        else if (ex[(size_t)idx]) hv = 0.0;
        else hv = 1.0;
        omega.at(idx) = std::min(hv - c, dx.d.at(idx) - rho);
    }

    // Certify the interpolation containment before touching the field:
    // {dX <= rho} is inside Omega by construction; no node with dY < rho
    // may be inside.
    std::vector<int> violations;
    for (int idx : hf.mask.excluded_y)
        if (omega.at(idx) <= 0.0) violations.push_back(idx);
    if (!violations.empty())
        throw ContainmentViolated(
            "extract_midsurface: " + std::to_string(violations.size()) +
            " nodes with dY < rho fall inside Omega (first at index " +
            std::to_string(violations.front()) + ")");

    Midsurface ms{c, rho, RegionSet(g), {}};
    ms.sigma = reinitialize(RegionSet(omega), metric);

    // Sigma band: mask nodes adjacent to a zero crossing of the Omega
    // field, carrying nu = grad h / |grad h|.
    std::vector<uint8_t> in_band((size_t)g.size(), 0);
    for (const Crossing& cr : interface_crossings(ms.sigma.u)) {
        in_band[(size_t)g.index(cr.i, cr.j)] = 1;
        in_band[(size_t)(cr.horizontal ? g.index(cr.i + 1, cr.j)
                                       : g.index(cr.i, cr.j + 1))] = 1;
    }
    for (int idx = 0; idx < g.size(); ++idx) {
        if (!in_band[(size_t)idx] || !hf.mask.in_mask[(size_t)idx]) continue;
        const int i = idx % g.nx(), j = idx / g.nx();
        double gx, gy;
        mask_gradient(hf.h, hf.mask, i, j, gx, gy);
        const double n = std::hypot(gx, gy);
        if (n == 0.0) continue;
        ms.band.push_back({idx, gx / n, gy / n, n});
    }
    return ms;
}

C1Report uniform_c1_check(const Midsurface& ms, const DistanceField& dx,
                          const DistanceField& dy, double delta) {
    const Grid& g = dx.grid();
    C1Report rep;
    rep.min_grad = kInf;

    // distance to the mask boundary measured along the offset fields:
    // min(dX,dY) - rho
    std::vector<const Midsurface::BandNode*> sel;
    for (const auto& bn : ms.band) {
        const double to_boundary =
            std::min(dx.d.at(bn.idx), dy.d.at(bn.idx)) - ms.rho;
        if (to_boundary < delta) sel.push_back(&bn);
    }
    rep.node_count = (int)sel.size();
    if (sel.empty()) {
        rep.min_grad = 0.0;
        return rep;
    }
    for (const auto* bn : sel) rep.min_grad = std::min(rep.min_grad, bn->grad_h);
    for (size_t a = 0; a < sel.size(); ++a) {
        const double xa = g.x(sel[a]->idx % g.nx()), ya = g.y(sel[a]->idx / g.nx());
        for (size_t b = a + 1; b < sel.size(); ++b) {
            const double xb = g.x(sel[b]->idx % g.nx()),
                         yb = g.y(sel[b]->idx / g.nx());
            if (std::hypot(xb - xa, yb - ya) >= delta) continue;
            const double dot = std::clamp(sel[a]->nux * sel[b]->nux +
                                              sel[a]->nuy * sel[b]->nuy,
                                          -1.0, 1.0);
            rep.max_angle = std::max(rep.max_angle, std::acos(dot));
            ++rep.pair_count;
        }
    }
    return rep;
}

}  // namespace mcflab
