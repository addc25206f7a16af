#include "mcflab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace mcflab {

namespace {

constexpr double kTinyPositive = 2.2250738585072014e-308;  // DBL_MIN

// Reflected index for the mirror (homogeneous Neumann) box boundary.
inline int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

// Explicit-Euler increment of the conformal level-set MCF operator at one
// node, central differences throughout.
inline double step_increment(const double* u, const MetricSpec& m, int i, int j,
                             double h, double eps2) {
    const Grid& g = m.grid();
    const int nx = g.nx(), ny = g.ny();
    const int il = reflect(i - 1, nx), ir = reflect(i + 1, nx);
    const int jl = reflect(j - 1, ny), jr = reflect(j + 1, ny);
    const int row = j * nx, rowl = jl * nx, rowr = jr * nx;

    const double uc = u[row + i];
    const double uxm = u[row + il], uxp = u[row + ir];
    const double uym = u[rowl + i], uyp = u[rowr + i];

    const double ux = (uxp - uxm) / (2 * h);
    const double uy = (uyp - uym) / (2 * h);
    const double uxx = (uxp - 2 * uc + uxm) / (h * h);
    const double uyy = (uyp - 2 * uc + uym) / (h * h);
    const double uxy = (u[rowr + ir] - u[rowr + il] - u[rowl + ir] + u[rowl + il]) /
                       (4 * h * h);

    const double g2 = ux * ux + uy * uy;
    const double ge2 = g2 + eps2;
    const double ge = std::sqrt(ge2);
    const double kappa_num = uxx * (uy * uy + eps2) - 2 * ux * uy * uxy +
                             uyy * (ux * ux + eps2);
    const double grad = std::sqrt(g2);
    const int idx = row + i;
    const double adv = m.phi_x.at(idx) * ux + m.phi_y.at(idx) * uy;
    return m.inv_e2phi.at(idx) * grad * (kappa_num / (ge2 * ge) + adv / ge);
}

void check_cfl(const MetricSpec& m, double dt, const FlowParams& p) {
    const double bound = p.dt_bound(m);
    if (dt > bound * (1.0 + 1e-12))
        throw CflViolated("dt " + std::to_string(dt) + " exceeds bound " +
                          std::to_string(bound));
}

// Largest in-band distance plus a safety margin; used as the far-field
// magnitude so the clamp never introduces a sign change.
double band_magnitude_from(const std::vector<double>& vals,
                           const std::vector<int>& band, double margin) {
    double mx = 0.0;
    for (int idx : band)
        if (std::isfinite(vals[(size_t)idx])) mx = std::max(mx, vals[(size_t)idx]);
    return mx + margin;
}

std::vector<int> interface_band(const ScalarField& u, int cells,
                                std::vector<int16_t>* depth_out);

// Signed reinitialization core; band = nullptr means full grid. A
// nonnegative freeze_depth limits the unit-gradient freeze to nodes
// within that many cells of the interface, which keeps narrow-band and
// full-grid evolution bitwise identical near the interface (frozen nodes
// would otherwise carry run-specific history).
ScalarField signed_reinit(const ScalarField& u, const MetricSpec& m,
                          const std::vector<int>* band, int freeze_depth = -1) {
    const Grid& g = u.grid();
    if (!has_interface(u))
        throw EmptyRegion("reinitialize: zero level set is empty");

    std::vector<uint8_t> freeze_ok;
    const std::vector<uint8_t>* freeze_ptr = nullptr;
    if (freeze_depth >= 0) {
        std::vector<int16_t> depth;
        (void)interface_band(u, freeze_depth, &depth);
        freeze_ok.assign((size_t)g.size(), 0);
        for (int idx = 0; idx < g.size(); ++idx)
            if (depth[(size_t)idx] >= 0) freeze_ok[(size_t)idx] = 1;
        freeze_ptr = &freeze_ok;
    }

    ScalarField dout = detail::unsigned_distance(u, m, band, freeze_ptr);
    ScalarField uneg(g, 0.0);
    for (int idx = 0; idx < g.size(); ++idx) uneg.at(idx) = -u.at(idx);
    ScalarField din = detail::unsigned_distance(uneg, m, band, freeze_ptr);

    ScalarField out(g, 0.0);
    if (band) {
        // Outside the band keep the original sign at a magnitude just above
        // the band-edge distances: the cliff then stays small enough that
        // stepped far values cannot drift across zero between reinits.
        const double margin = 2.0 * g.h() * m.max_e_phi;
        const double mag =
            std::max(band_magnitude_from(dout.data(), *band, margin),
                     band_magnitude_from(din.data(), *band, margin));
        for (int idx = 0; idx < g.size(); ++idx)
            out.at(idx) = u.at(idx) > 0.0 ? mag : -mag;
        for (int idx : *band)
            out.at(idx) = u.at(idx) > 0.0
                              ? std::max(dout.at(idx), kTinyPositive)
                              : -din.at(idx);
    } else {
        // the max() keeps a vanishing chord distance from flipping a
        // positive node onto the interface
        for (int idx = 0; idx < g.size(); ++idx)
            out.at(idx) = u.at(idx) > 0.0
                              ? std::max(dout.at(idx), kTinyPositive)
                              : -din.at(idx);
    }

    // Zero-set movement check: the crossing edges are sign-identical by
    // construction, so compare subcell positions edge by edge.
    const double h = g.h();
    for (const Crossing& c : interface_crossings(u)) {
        const double a = out(c.i, c.j);
        const double b =
            c.horizontal ? out(c.i + 1, c.j) : out(c.i, c.j + 1);
        if ((a <= 0.0) == (b <= 0.0))
            throw SolverDiverged("reinitialize: interface sign pattern changed");
        const double theta_new = a / (a - b);
        if (std::abs(theta_new - c.theta) * h > 0.5 * h + 1e-9)
            throw SolverDiverged(
                "reinitialize: zero set moved by more than h/2");
    }
    out.check_finite("reinitialize");
    return out;
}

// Nodes within `cells` Chebyshev distance (8-neighbor BFS) of any
// interface crossing; optionally exposes the per-node depth (-1 outside
// the band). The stencil spreads one Chebyshev cell per step, so this is
// the metric every creep margin is stated in.
std::vector<int> interface_band(const ScalarField& u, int cells,
                                std::vector<int16_t>* depth_out) {
    const Grid& g = u.grid();
    const int nx = g.nx(), ny = g.ny();
    std::vector<int16_t> depth((size_t)g.size(), -1);
    std::deque<int> q;
    for (const Crossing& c : interface_crossings(u)) {
        const int a = g.index(c.i, c.j);
        const int b = c.horizontal ? g.index(c.i + 1, c.j) : g.index(c.i, c.j + 1);
        if (depth[(size_t)a] < 0) { depth[(size_t)a] = 0; q.push_back(a); }
        if (depth[(size_t)b] < 0) { depth[(size_t)b] = 0; q.push_back(b); }
    }
    std::vector<int> band;
    while (!q.empty()) {
        const int idx = q.front();
        q.pop_front();
        band.push_back(idx);
        if (depth[(size_t)idx] >= cells) continue;
        const int i = idx % nx, j = idx / nx;
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const int qi = i + di, qj = j + dj;
                if ((di == 0 && dj == 0) || qi < 0 || qi >= nx || qj < 0 ||
                    qj >= ny)
                    continue;
                const int qq = g.index(qi, qj);
                if (depth[(size_t)qq] >= 0) continue;
                depth[(size_t)qq] = (int16_t)(depth[(size_t)idx] + 1);
                q.push_back(qq);
            }
        }
    }
    std::sort(band.begin(), band.end());
    if (depth_out) *depth_out = std::move(depth);
    return band;
}

// Guard for the domain-truncation contract: the interface must stay 10h
// clear of the box boundary except where it exits transversally (a level
// line running out of the box sideways is the scenario author's choice;
// an interface whose normal points at a nearby wall is about to collide
// with it).
void boundary_guard(const ScalarField& u) {
    const Grid& g = u.grid();
    const int nx = g.nx(), ny = g.ny();
    const int margin = 10;
    const double h = g.h();
    for (const Crossing& c : interface_crossings(u)) {
        const bool near_left = c.i < margin;
        const bool near_right = c.i + (c.horizontal ? 1 : 0) >= nx - margin;
        const bool near_bottom = c.j < margin;
        const bool near_top = c.j + (c.horizontal ? 0 : 1) >= ny - margin;
        if (!(near_left || near_right || near_bottom || near_top)) continue;
        const int i = std::clamp(c.i, 1, nx - 2);
        const int j = std::clamp(c.j, 1, ny - 2);
        const double gx = (u(i + 1, j) - u(i - 1, j)) / (2 * h);
        const double gy = (u(i, j + 1) - u(i, j - 1)) / (2 * h);
        const double norm = std::hypot(gx, gy);
        if (norm == 0.0) continue;
        if (((near_left || near_right) && std::abs(gx) / norm > 0.5) ||
            ((near_bottom || near_top) && std::abs(gy) / norm > 0.5))
            throw InterfaceNearBoundary(
                "interface within 10h of the box boundary near node (" +
                std::to_string(c.i) + "," + std::to_string(c.j) + ")");
    }
}

}  // namespace

RegionSet mcf_step(const RegionSet& region, const MetricSpec& metric, double dt,
                   const FlowParams& params) {
    if (!region.grid().same_geometry(metric.grid()))
        throw ValidationError("mcf_step: grid mismatch");
    check_cfl(metric, dt, params);
    const Grid& g = region.grid();
    const double h = g.h();
    const double eps2 = params.eps_reg * params.eps_reg;
    RegionSet out(g);
    const double* u = region.u.data().data();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            out.u(i, j) = u[g.index(i, j)] +
                          dt * step_increment(u, metric, i, j, h, eps2);
    out.u.check_finite("mcf_step");
    return out;
}

RegionSet reinitialize(const RegionSet& region, const MetricSpec& metric) {
    if (!region.grid().same_geometry(metric.grid()))
        throw ValidationError("reinitialize: grid mismatch");
    return RegionSet(signed_reinit(region.u, metric, nullptr));
}

Trajectory evolve(const RegionSet& initial,
                  std::shared_ptr<const MetricSpec> metric,
                  const FlowParams& params, std::vector<double> record_times) {
    if (!metric) throw ValidationError("evolve: null metric");
    const MetricSpec& m = *metric;
    if (!initial.grid().same_geometry(m.grid()))
        throw ValidationError("evolve: grid mismatch");
    if (!(params.t_end > 0.0)) throw ValidationError("evolve: t_end must be > 0");

    if (record_times.empty()) record_times = {0.0, params.t_end};
    std::sort(record_times.begin(), record_times.end());
    if (record_times.front() < -1e-12 ||
        record_times.back() > params.t_end * (1.0 + 1e-12))
        throw ValidationError("evolve: record_times outside [0, t_end]");

    const double dt = params.effective_dt(m);
    check_cfl(m, dt, params);

    // Map requested times to step indices (actual recorded time is k*dt).
    std::vector<long> record_steps;
    for (double tr : record_times) {
        const long k = (long)std::ceil(tr / dt - 1e-9);
        if (record_steps.empty() || k > record_steps.back())
            record_steps.push_back(std::max(k, 0L));
    }

    // The unit-gradient freeze covers every node whose value can reach an
    // interface stencil between reinits; the band keeps its clamp far
    // enough out that the freeze tests never read contaminated values, so
    // banded and full-grid runs stay bitwise identical near the interface.
    const int freeze_depth = params.reinit_every + 2;
    const int band_cells =
        params.reinit_band > 0
            ? std::max(params.reinit_band, freeze_depth + params.reinit_every + 2)
            : 0;

    Trajectory traj;
    traj.metric = metric;
    traj.dt = dt;

    ScalarField u = initial.u;
    std::vector<int> band;
    auto reinit_now = [&]() {
        if (band_cells > 0) {
            band = interface_band(u, band_cells, nullptr);
            u = signed_reinit(u, m, &band, freeze_depth);
        } else {
            u = signed_reinit(u, m, nullptr, freeze_depth);
        }
    };
    boundary_guard(u);
    if (!has_interface(u)) throw EmptyRegion("evolve: initial region has no interface");
    reinit_now();

    size_t next_rec = 0;
    if (record_steps[0] == 0) {
        traj.times.push_back(0.0);
        traj.states.push_back(RegionSet(u));
        next_rec = 1;
    }
    if (next_rec >= record_steps.size()) return traj;

    const long last_step = record_steps.back();
    const double eps2 = params.eps_reg * params.eps_reg;
    const double h = m.grid().h();
    const Grid& g = m.grid();

    // Ping-pong buffers; far-field values are kept identical in both so
    // banded updates never read stale data.
    ScalarField ubuf = u;
    ScalarField* cur = &u;
    ScalarField* nxt = &ubuf;

    for (long k = 1; k <= last_step; ++k) {
        const double* src = cur->data().data();
        double* dst = nxt->data().data();
        if (band_cells > 0) {
            for (int idx : band) {
                const int i = idx % g.nx(), j = idx / g.nx();
                dst[idx] = src[idx] + dt * step_increment(src, m, i, j, h, eps2);
            }
        } else {
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i) {
                    const int idx = g.index(i, j);
                    dst[idx] = src[idx] + dt * step_increment(src, m, i, j, h, eps2);
                }
        }
        std::swap(cur, nxt);

        const bool record_due =
            next_rec < record_steps.size() && k == record_steps[next_rec];
        const bool reinit_due = (k % params.reinit_every == 0) || record_due;
        if (!reinit_due) continue;

        if (!has_interface(*cur)) {
            traj.extinct = true;
            traj.extinction_time = k * dt;
            break;
        }
        boundary_guard(*cur);
        if (band_cells > 0) {
            band = interface_band(*cur, band_cells, nullptr);
            *cur = signed_reinit(*cur, m, &band, freeze_depth);
        } else {
            *cur = signed_reinit(*cur, m, nullptr, freeze_depth);
        }
        *nxt = *cur;  // resync far field after the band changed
        if (record_due) {
            traj.times.push_back(k * dt);
            traj.states.push_back(RegionSet(*cur));
            ++next_rec;
        }
    }
    return traj;
}

Trajectory offset_flow(const Trajectory& base, double c, double lambda,
                       const MetricSpec& metric) {
    if (c < 0.0) throw ValidationError("offset_flow: c must be >= 0");
    if (!(lambda < metric.lambda_lower))
        throw LambdaNotBelowRicciBound(
            "offset_flow: lambda must be strictly below the Ricci bound " +
            std::to_string(metric.lambda_lower));
    if (base.metric && !base.metric->compatible(metric))
        throw ValidationError("offset_flow: metric mismatch with trajectory");

    Trajectory out;
    out.metric = base.metric;
    out.dt = base.dt;
    out.extinct = base.extinct;
    out.extinction_time = base.extinction_time;
    out.times = base.times;
    out.states.reserve(base.states.size());
    for (size_t k = 0; k < base.states.size(); ++k) {
        if (c == 0.0) {
            out.states.push_back(base.states[k]);
            continue;
        }
        const double w = c * std::exp(lambda * base.times[k]);
        ScalarField d = detail::unsigned_distance(base.states[k].u, metric);
        for (double& v : d.data()) v -= w;
        out.states.push_back(RegionSet(std::move(d)));
    }
    return out;
}

}  // namespace mcflab
