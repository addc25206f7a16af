#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcflab/errors.hpp"

namespace mcflab {

enum class OracleKind { EuclidCircle, HyperbolicCircle, AnnulusHarmonic, ExpOffset };

// Closed-form / ODE reference values used to validate the grid flows:
//   euclid_circle r0;  t -> sqrt(r0^2 - 2t)
//   hyperbolic_circle r0;  dr/dt = -coth(r), RK4 with Richardson check
//   annulus_harmonic r0 r1;  r -> ln(r/r0)/ln(r1/r0)
//   exp_offset c lambda;  t -> c e^{lambda t}
struct OracleResult {
    OracleKind kind;
    std::vector<double> params;
    std::vector<double> inputs;
    std::vector<double> values;
    std::vector<uint8_t> past_extinction;
};

OracleResult oracle(OracleKind kind, const std::vector<double>& params,
                    const std::vector<double>& inputs);

OracleKind oracle_kind_from_name(const std::string& name);  // UnsupportedKind
std::string oracle_kind_name(OracleKind kind);

}  // namespace mcflab
