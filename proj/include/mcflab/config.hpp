#pragma once

#include <string>
#include <vector>

#include "mcflab/metric.hpp"

namespace mcflab {

// One initial-set shape. Parameter meaning by kind:
//   circle cx cy r        the disk {|p - (cx,cy)| <= r}
//   halfplane a b c       the set {a x + b y <= c}
//   graph_band A          the band {|y| <= A/(1 + x^2)}
//   custom <expression>   the set {expr(x,y) <= 0}
struct ShapeSpec {
    enum class Kind { Circle, Halfplane, GraphBand, Custom };
    Kind kind = Kind::Circle;
    std::vector<double> p;
    std::string expr;

    bool operator==(const ShapeSpec&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    bool hypothesis_unmet_expected = false;

    int grid_n = 256;
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;

    MetricKind metric_kind = MetricKind::Euclidean;
    std::string metric_phi;

    std::vector<ShapeSpec> shapes_x, shapes_y;

    double t_end = 0.1;
    double cfl = 0.4;
    double dt = 0.0;  // 0 = auto
    int reinit_every = 5;
    double eps_reg = 1e-8;
    std::vector<double> record_times;  // empty = 5 evenly spaced

    bool interp_enable = false;
    int interp_k = 3;

    bool offset_enable = false;
    double offset_c = 0.0;
    double offset_lambda = -1.0;

    double tolerance = -1.0;  // <0 = auto (2h + dt)
    bool oracle_check = false;
    std::vector<double> report_lambdas;

    std::string output_csv;  // empty = "<name>.csv"
    int svg_every = 0;

    bool operator==(const ScenarioConfig&) const = default;

    std::string csv_path() const {
        return output_csv.empty() ? name + ".csv" : output_csv;
    }
};

// Parses the key-value scenario schema; ParseError carries the line
// number, ValidationError names the offending key.
ScenarioConfig load_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

// Canonical serialization; load_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& c);

}  // namespace mcflab
