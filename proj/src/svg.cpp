#include "mcflab/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace mcflab {

namespace {

using Point = std::array<double, 2>;

struct Segment {
    Point a, b;
};

// Crossing point on the edge from p0 (value v0) to p1 (value v1).
Point edge_point(const Point& p0, double v0, const Point& p1, double v1) {
    const double t = v0 / (v0 - v1);
    return {p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])};
}

std::vector<Segment> marching_squares(const ScalarField& u) {
    const Grid& g = u.grid();
    std::vector<Segment> segs;
    for (int j = 0; j + 1 < g.ny(); ++j) {
        for (int i = 0; i + 1 < g.nx(); ++i) {
            const double v0 = u(i, j), v1 = u(i + 1, j);
            const double v2 = u(i + 1, j + 1), v3 = u(i, j + 1);
            const bool b0 = v0 <= 0, b1 = v1 <= 0, b2 = v2 <= 0, b3 = v3 <= 0;
            const int idx = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
            if (idx == 0 || idx == 15) continue;
            const Point p0{g.x(i), g.y(j)}, p1{g.x(i + 1), g.y(j)};
            const Point p2{g.x(i + 1), g.y(j + 1)}, p3{g.x(i), g.y(j + 1)};
            // crossing points on the four cell edges
            const bool eb = b0 != b1, er = b1 != b2, et = b3 != b2, el = b0 != b3;
            Point B{}, R{}, T{}, L{};
            if (eb) B = edge_point(p0, v0, p1, v1);
            if (er) R = edge_point(p1, v1, p2, v2);
            if (et) T = edge_point(p3, v3, p2, v2);
            if (el) L = edge_point(p0, v0, p3, v3);
            if (eb && er && et && el) {
                // saddle: split by the cell-centre average
                const bool centre_in = (v0 + v1 + v2 + v3) * 0.25 <= 0;
                if (b0 == centre_in) {
                    segs.push_back({B, R});
                    segs.push_back({T, L});
                } else {
                    segs.push_back({B, L});
                    segs.push_back({R, T});
                }
                continue;
            }
            Point pts[4];
            int n = 0;
            if (eb) pts[n++] = B;
            if (er) pts[n++] = R;
            if (et) pts[n++] = T;
            if (el) pts[n++] = L;
            if (n == 2) segs.push_back({pts[0], pts[1]});
        }
    }
    return segs;
}

}  // namespace

std::vector<Polyline> extract_contours(const ScalarField& u) {
    const std::vector<Segment> segs = marching_squares(u);
    // Crossing points on a shared edge are computed from the same node
    // values in both adjacent cells, so exact keys chain correctly.
    std::map<std::pair<double, double>, std::vector<size_t>> at;
    for (size_t s = 0; s < segs.size(); ++s) {
        at[{segs[s].a[0], segs[s].a[1]}].push_back(s);
        at[{segs[s].b[0], segs[s].b[1]}].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<Polyline> out;
    for (size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (used[s0]) continue;
        used[s0] = true;
        Polyline line{segs[s0].a, segs[s0].b};
        // extend forward then backward
        for (int dir = 0; dir < 2; ++dir) {
            for (;;) {
                const Point& tip = dir == 0 ? line.back() : line.front();
                const auto it = at.find({tip[0], tip[1]});
                size_t next = segs.size();
                for (size_t cand : it->second)
                    if (!used[cand]) { next = cand; break; }
                if (next == segs.size()) break;
                used[next] = true;
                const Point& a = segs[next].a;
                const Point add = (a[0] == tip[0] && a[1] == tip[1]) ? segs[next].b
                                                                     : segs[next].a;
                if (dir == 0) line.push_back(add);
                else line.insert(line.begin(), add);
            }
        }
        out.push_back(std::move(line));
    }
    return out;
}

void render_svg(const std::vector<std::pair<std::string, const RegionSet*>>& regions,
                const Grid& grid, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");

    char buf[128];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.8g", v);
        return std::string(buf);
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    const double w = grid.xmax() - grid.xmin(), hgt = grid.ymax() - grid.ymin();
    // y axis is flipped by negating coordinates, hence the -ymax origin
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
      << num(grid.xmin()) << " " << num(-grid.ymax()) << " " << num(w) << " "
      << num(hgt) << "\">\n";
    f << "<rect x=\"" << num(grid.xmin()) << "\" y=\"" << num(-grid.ymax())
      << "\" width=\"" << num(w) << "\" height=\"" << num(hgt)
      << "\" fill=\"white\"/>\n";

    int color = 0;
    for (const auto& [id, region] : regions) {
        const std::vector<Polyline> lines = extract_contours(region->u);
        if (!lines.empty()) {
            f << "<path id=\"" << id << "\" fill=\"none\" stroke=\""
              << palette[color % 4] << "\" stroke-width=\""
              << num(grid.h() * 0.5) << "\" d=\"";
            for (const Polyline& line : lines) {
                const bool closed = line.size() > 2 &&
                                    line.front()[0] == line.back()[0] &&
                                    line.front()[1] == line.back()[1];
                const size_t n = closed ? line.size() - 1 : line.size();
                for (size_t k = 0; k < n; ++k)
                    f << (k == 0 ? "M" : "L") << num(line[k][0]) << ","
                      << num(-line[k][1]);
                if (closed) f << "Z";
            }
            f << "\"/>\n";
        }
        ++color;
    }
    f << "</svg>\n";
    if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace mcflab
