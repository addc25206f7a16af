#include "mcflab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcflab {

namespace {

void need_params(const std::vector<double>& p, size_t n, const char* kind) {
    if (p.size() != n)
        throw ValidationError(std::string("oracle ") + kind + " expects " +
                              std::to_string(n) + " parameter(s)");
}

// RK4 for dr/dt = -coth(r) with a fixed substep; returns radii at the
// requested (sorted) times, with extinction flagged.
void integrate_coth(double r0, const std::vector<double>& times, double step,
                    std::vector<double>& values, std::vector<uint8_t>& dead) {
    auto f = [](double r) { return -1.0 / std::tanh(r); };
    double t = 0.0, r = r0;
    values.assign(times.size(), 0.0);
    dead.assign(times.size(), 0);
    const double r_floor = 1e-7;
    bool extinct = false;
    for (size_t k = 0; k < times.size(); ++k) {
        const double target = times[k];
        while (!extinct && t < target - 1e-15) {
            const double dt = std::min(step, target - t);
            const double k1 = f(r);
            if (r + 0.5 * dt * k1 <= r_floor) { extinct = true; break; }
            const double k2 = f(r + 0.5 * dt * k1);
            if (r + 0.5 * dt * k2 <= r_floor) { extinct = true; break; }
            const double k3 = f(r + 0.5 * dt * k2);
            if (r + dt * k3 <= r_floor) { extinct = true; break; }
            const double k4 = f(r + dt * k3);
            r += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            t += dt;
            if (r <= r_floor) { extinct = true; break; }
        }
        if (extinct) {
            dead[k] = 1;
            values[k] = 0.0;
        } else {
            values[k] = r;
        }
    }
}

}  // namespace

OracleResult oracle(OracleKind kind, const std::vector<double>& params,
                    const std::vector<double>& inputs) {
    OracleResult out{kind, params, inputs, {}, {}};
    out.values.reserve(inputs.size());
    out.past_extinction.assign(inputs.size(), 0);

    switch (kind) {
        case OracleKind::EuclidCircle: {
            need_params(params, 1, "euclid_circle");
            const double r0 = params[0];
            if (!(r0 > 0.0)) throw ValidationError("euclid_circle: r0 must be > 0");
            for (size_t k = 0; k < inputs.size(); ++k) {
                const double s = r0 * r0 - 2.0 * inputs[k];
                if (s <= 0.0) {
                    out.past_extinction[k] = 1;
                    out.values.push_back(0.0);
                } else {
                    out.values.push_back(std::sqrt(s));
                }
            }
            break;
        }
        case OracleKind::HyperbolicCircle: {
            need_params(params, 1, "hyperbolic_circle");
            const double r0 = params[0];
            if (!(r0 > 0.0))
                throw ValidationError("hyperbolic_circle: r0 must be > 0");
            std::vector<double> times = inputs;
            for (double t : times)
                if (t < 0.0)
                    throw ValidationError("hyperbolic_circle: negative time");
            std::vector<size_t> order(times.size());
            for (size_t k = 0; k < order.size(); ++k) order[k] = k;
            std::sort(order.begin(), order.end(),
                      [&](size_t a, size_t b) { return times[a] < times[b]; });
            std::vector<double> sorted;
            for (size_t k : order) sorted.push_back(times[k]);

            double gap = 1e-4;
            for (size_t k = 0; k + 1 < sorted.size(); ++k)
                if (sorted[k + 1] > sorted[k])
                    gap = std::min(gap, (sorted[k + 1] - sorted[k]) / 10.0);
            std::vector<double> v1, v2;
            std::vector<uint8_t> d1, d2;
            integrate_coth(r0, sorted, gap, v1, d1);
            integrate_coth(r0, sorted, gap / 2.0, v2, d2);
            for (size_t k = 0; k < sorted.size(); ++k)
                if (!d1[k] && !d2[k] && std::abs(v1[k] - v2[k]) > 1e-8)
                    throw SolverDiverged(
                        "hyperbolic_circle oracle failed Richardson check");
            out.values.assign(inputs.size(), 0.0);
            for (size_t k = 0; k < order.size(); ++k) {
                out.values[order[k]] = v2[k];
                out.past_extinction[order[k]] = d2[k];
            }
            break;
        }
        case OracleKind::AnnulusHarmonic: {
            need_params(params, 2, "annulus_harmonic");
            const double r0 = params[0], r1 = params[1];
            if (!(r0 > 0.0) || !(r1 > r0))
                throw ValidationError("annulus_harmonic: need 0 < r0 < r1");
            for (double r : inputs)
                out.values.push_back(std::log(r / r0) / std::log(r1 / r0));
            break;
        }
        case OracleKind::ExpOffset: {
            need_params(params, 2, "exp_offset");
            const double c = params[0], lambda = params[1];
            if (c < 0.0) throw ValidationError("exp_offset: c must be >= 0");
            for (double t : inputs) out.values.push_back(c * std::exp(lambda * t));
            break;
        }
    }
    return out;
}

OracleKind oracle_kind_from_name(const std::string& name) {
    if (name == "euclid_circle") return OracleKind::EuclidCircle;
    if (name == "hyperbolic_circle") return OracleKind::HyperbolicCircle;
    if (name == "annulus_harmonic") return OracleKind::AnnulusHarmonic;
    if (name == "exp_offset") return OracleKind::ExpOffset;
    throw UnsupportedKind("oracle kind '" + name + "'");
}

std::string oracle_kind_name(OracleKind kind) {
    switch (kind) {
        case OracleKind::EuclidCircle: return "euclid_circle";
        case OracleKind::HyperbolicCircle: return "hyperbolic_circle";
        case OracleKind::AnnulusHarmonic: return "annulus_harmonic";
        case OracleKind::ExpOffset: return "exp_offset";
    }
    return "euclid_circle";
}

}  // namespace mcflab
