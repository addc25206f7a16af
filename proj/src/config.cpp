#include "mcflab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcflab/expr.hpp"

namespace mcflab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double parse_num(const std::string& tok, int line) {
    try {
        size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line) + ": bad number '" +
                         tok + "'");
    }
}

std::vector<double> parse_nums(const std::string& v, int line) {
    std::vector<double> out;
    for (const std::string& tok : split_ws(v)) out.push_back(parse_num(tok, line));
    return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ValidationError("key '" + key + "' expects a boolean, got '" + v + "'");
}

ShapeSpec parse_shape(const std::string& v, const std::string& key, int line) {
    const std::vector<std::string> toks = split_ws(v);
    if (toks.empty())
        throw ValidationError("key '" + key + "' needs a shape description");
    ShapeSpec s;
    if (toks[0] == "circle") {
        if (toks.size() != 4)
            throw ValidationError("key '" + key + "': circle needs cx cy r");
        s.kind = ShapeSpec::Kind::Circle;
        for (size_t k = 1; k < 4; ++k) s.p.push_back(parse_num(toks[k], line));
        if (!(s.p[2] > 0.0))
            throw ValidationError("key '" + key + "': circle radius must be > 0");
    } else if (toks[0] == "halfplane") {
        if (toks.size() != 4)
            throw ValidationError("key '" + key + "': halfplane needs a b c");
        s.kind = ShapeSpec::Kind::Halfplane;
        for (size_t k = 1; k < 4; ++k) s.p.push_back(parse_num(toks[k], line));
        if (s.p[0] == 0.0 && s.p[1] == 0.0)
            throw ValidationError("key '" + key + "': halfplane normal is zero");
    } else if (toks[0] == "graph_band") {
        if (toks.size() != 2)
            throw ValidationError("key '" + key + "': graph_band needs amplitude");
        s.kind = ShapeSpec::Kind::GraphBand;
        s.p.push_back(parse_num(toks[1], line));
        if (!(s.p[0] > 0.0))
            throw ValidationError("key '" + key + "': amplitude must be > 0");
    } else if (toks[0] == "custom") {
        s.kind = ShapeSpec::Kind::Custom;
        const size_t at = v.find("custom");
        s.expr = trim(v.substr(at + 6));
        if (s.expr.empty())
            throw ValidationError("key '" + key + "': custom needs an expression");
        Expr check(s.expr);  // parse now so errors carry the config line
    } else {
        throw ValidationError("key '" + key + "': unknown shape '" + toks[0] + "'");
    }
    return s;
}

// Definite-overlap pre-checks for analytic shape pairs; geometry the
// parser cannot decide is validated at run time via set_distance > 0.
bool definitely_overlap(const ShapeSpec& a, const ShapeSpec& b) {
    using K = ShapeSpec::Kind;
    auto norm = [](const ShapeSpec& s) { return std::hypot(s.p[0], s.p[1]); };
    if (a.kind == K::Circle && b.kind == K::Circle) {
        const double d = std::hypot(a.p[0] - b.p[0], a.p[1] - b.p[1]);
        return d <= a.p[2] + b.p[2];
    }
    if (a.kind == K::Circle && b.kind == K::Halfplane) {
        const double signed_dist =
            (b.p[0] * a.p[0] + b.p[1] * a.p[1] - b.p[2]) / norm(b);
        return signed_dist <= a.p[2];
    }
    if (a.kind == K::Halfplane && b.kind == K::Circle)
        return definitely_overlap(b, a);
    if (a.kind == K::Halfplane && b.kind == K::Halfplane) {
        const double na = norm(a), nb = norm(b);
        const double cosang = (a.p[0] * b.p[0] + a.p[1] * b.p[1]) / (na * nb);
        if (cosang > -1.0 + 1e-12) return false;  // only antiparallel is decidable
        return a.p[2] / na + b.p[2] / nb >= 0.0;
    }
    return false;
}

void validate(const ScenarioConfig& c) {
    if (c.grid_n < 16) throw ValidationError("key 'grid.n' must be >= 16");
    if (!(c.xmax > c.xmin) || !(c.ymax > c.ymin))
        throw ValidationError("key 'grid.bounds' must be increasing per axis");
    const double hx = (c.xmax - c.xmin) / (c.grid_n - 1);
    const double hy = (c.ymax - c.ymin) / (c.grid_n - 1);
    if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
        throw ValidationError("key 'grid.bounds' must give equal spacing on both axes");
    if (c.metric_kind == MetricKind::PoincareDisk) {
        const double rc = std::hypot(std::max(std::abs(c.xmin), std::abs(c.xmax)),
                                     std::max(std::abs(c.ymin), std::abs(c.ymax)));
        if (rc >= 1.0)
            throw ValidationError(
                "key 'grid.bounds' must lie strictly inside the unit disk for "
                "metric.kind = poincare_disk");
    }
    if (c.metric_kind == MetricKind::CustomConformal && c.metric_phi.empty())
        throw ValidationError("key 'metric.phi' is required for custom_conformal");
    if (c.shapes_x.empty()) throw ValidationError("key 'shapes.x[]' is required");
    if (c.shapes_y.empty()) throw ValidationError("key 'shapes.y[]' is required");
    if (!(c.t_end > 0.0)) throw ValidationError("key 'flow.t_end' must be > 0");
    if (!(c.cfl > 0.0) || c.cfl > 1.0)
        throw ValidationError("key 'flow.cfl' must be in (0, 1]");
    if (c.dt < 0.0) throw ValidationError("key 'flow.dt' must be >= 0");
    if (c.reinit_every < 1)
        throw ValidationError("key 'flow.reinit_every' must be >= 1");
    if (c.interp_k < 1) throw ValidationError("key 'interp.k' must be >= 1");
    if (c.offset_c < 0.0) throw ValidationError("key 'offset.c' must be >= 0");
    if (c.svg_every < 0)
        throw ValidationError("key 'output.svg_every' must be >= 0");
    for (double t : c.record_times)
        if (t < 0.0 || t > c.t_end * (1.0 + 1e-12))
            throw ValidationError("key 'flow.record_times' must lie in [0, t_end]");
    if (!c.hypothesis_unmet_expected) {
        for (const ShapeSpec& a : c.shapes_x)
            for (const ShapeSpec& b : c.shapes_y)
                if (definitely_overlap(a, b))
                    throw ValidationError(
                        "keys 'shapes.x[]'/'shapes.y[]' describe overlapping sets "
                        "(tag the scenario hypothesis_unmet_expected if intended)");
    }
}

}  // namespace

ScenarioConfig load_config(const std::string& text) {
    ScenarioConfig c;
    c.record_times.clear();
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    bool saw_tag = false;
    while (std::getline(is, raw)) {
        ++line;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        raw = trim(raw);
        if (raw.empty()) continue;
        const size_t eq = raw.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(raw.substr(0, eq));
        const std::string val = trim(raw.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(line) + ": empty key");
        if (val.empty())
            throw ParseError("line " + std::to_string(line) + ": empty value for '" +
                             key + "'");

        if (key == "scenario.name") c.name = val;
        else if (key == "scenario.tag") {
            if (val != "hypothesis_unmet_expected")
                throw ValidationError("key 'scenario.tag' only accepts "
                                      "hypothesis_unmet_expected");
            saw_tag = true;
        } else if (key == "grid.n") c.grid_n = (int)parse_num(val, line);
        else if (key == "grid.bounds") {
            const std::vector<double> b = parse_nums(val, line);
            if (b.size() != 4)
                throw ValidationError("key 'grid.bounds' needs xmin xmax ymin ymax");
            c.xmin = b[0]; c.xmax = b[1]; c.ymin = b[2]; c.ymax = b[3];
        } else if (key == "metric.kind") c.metric_kind = metric_kind_from_name(val);
        else if (key == "metric.phi") { c.metric_phi = val; Expr check(val); }
        else if (key == "shapes.x[]") c.shapes_x.push_back(parse_shape(val, key, line));
        else if (key == "shapes.y[]") c.shapes_y.push_back(parse_shape(val, key, line));
        else if (key == "flow.t_end") c.t_end = parse_num(val, line);
        else if (key == "flow.cfl") c.cfl = parse_num(val, line);
        else if (key == "flow.dt") c.dt = val == "auto" ? 0.0 : parse_num(val, line);
        else if (key == "flow.reinit_every") c.reinit_every = (int)parse_num(val, line);
        else if (key == "flow.eps_reg") c.eps_reg = parse_num(val, line);
        else if (key == "flow.record_times") c.record_times = parse_nums(val, line);
        else if (key == "interp.enable") c.interp_enable = parse_bool(val, key);
        else if (key == "interp.k") c.interp_k = (int)parse_num(val, line);
        else if (key == "offset.enable") c.offset_enable = parse_bool(val, key);
        else if (key == "offset.c") c.offset_c = parse_num(val, line);
        else if (key == "offset.lambda") c.offset_lambda = parse_num(val, line);
        else if (key == "report.tolerance")
            c.tolerance = val == "auto" ? -1.0 : parse_num(val, line);
        else if (key == "report.oracle") {
            if (val == "auto") c.oracle_check = true;
            else if (val == "off") c.oracle_check = false;
            else throw ValidationError("key 'report.oracle' accepts auto|off");
        } else if (key == "report.lambdas") c.report_lambdas = parse_nums(val, line);
        else if (key == "output.csv") c.output_csv = val;
        else if (key == "output.svg_every") c.svg_every = (int)parse_num(val, line);
        else throw ValidationError("unknown key '" + key + "' (line " +
                                   std::to_string(line) + ")");
    }
    c.hypothesis_unmet_expected = saw_tag;
    validate(c);
    return c;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    ScenarioConfig c = load_config(ss.str());
    if (c.name == "scenario") {
        // default the name to the file stem
        std::string stem = path;
        const size_t slash = stem.find_last_of("/\\");
        if (slash != std::string::npos) stem = stem.substr(slash + 1);
        const size_t dot = stem.find_last_of('.');
        if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
        if (!stem.empty()) c.name = stem;
    }
    return c;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_shape(std::ostringstream& os, const char* key, const ShapeSpec& s) {
    os << key << " = ";
    switch (s.kind) {
        case ShapeSpec::Kind::Circle:
            os << "circle " << fmt(s.p[0]) << " " << fmt(s.p[1]) << " "
               << fmt(s.p[2]);
            break;
        case ShapeSpec::Kind::Halfplane:
            os << "halfplane " << fmt(s.p[0]) << " " << fmt(s.p[1]) << " "
               << fmt(s.p[2]);
            break;
        case ShapeSpec::Kind::GraphBand:
            os << "graph_band " << fmt(s.p[0]);
            break;
        case ShapeSpec::Kind::Custom:
            os << "custom " << s.expr;
            break;
    }
    os << "\n";
}

}  // namespace

std::string serialize_config(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "scenario.name = " << c.name << "\n";
    if (c.hypothesis_unmet_expected)
        os << "scenario.tag = hypothesis_unmet_expected\n";
    os << "grid.n = " << c.grid_n << "\n";
    os << "grid.bounds = " << fmt(c.xmin) << " " << fmt(c.xmax) << " "
       << fmt(c.ymin) << " " << fmt(c.ymax) << "\n";
    os << "metric.kind = " << metric_kind_name(c.metric_kind) << "\n";
    if (!c.metric_phi.empty()) os << "metric.phi = " << c.metric_phi << "\n";
    for (const ShapeSpec& s : c.shapes_x) emit_shape(os, "shapes.x[]", s);
    for (const ShapeSpec& s : c.shapes_y) emit_shape(os, "shapes.y[]", s);
    os << "flow.t_end = " << fmt(c.t_end) << "\n";
    os << "flow.cfl = " << fmt(c.cfl) << "\n";
    if (c.dt > 0.0) os << "flow.dt = " << fmt(c.dt) << "\n";
    os << "flow.reinit_every = " << c.reinit_every << "\n";
    os << "flow.eps_reg = " << fmt(c.eps_reg) << "\n";
    if (!c.record_times.empty()) {
        os << "flow.record_times =";
        for (double t : c.record_times) os << " " << fmt(t);
        os << "\n";
    }
    os << "interp.enable = " << (c.interp_enable ? "true" : "false") << "\n";
    os << "interp.k = " << c.interp_k << "\n";
    os << "offset.enable = " << (c.offset_enable ? "true" : "false") << "\n";
    if (c.offset_enable || c.offset_c != 0.0)
        os << "offset.c = " << fmt(c.offset_c) << "\n";
    if (c.offset_enable || c.offset_lambda != -1.0)
        os << "offset.lambda = " << fmt(c.offset_lambda) << "\n";
    os << "report.tolerance = "
       << (c.tolerance < 0.0 ? std::string("auto") : fmt(c.tolerance)) << "\n";
    os << "report.oracle = " << (c.oracle_check ? "auto" : "off") << "\n";
    if (!c.report_lambdas.empty()) {
        os << "report.lambdas =";
        for (double v : c.report_lambdas) os << " " << fmt(v);
        os << "\n";
    }
    if (!c.output_csv.empty()) os << "output.csv = " << c.output_csv << "\n";
    os << "output.svg_every = " << c.svg_every << "\n";
    return os.str();
}

}  // namespace mcflab
