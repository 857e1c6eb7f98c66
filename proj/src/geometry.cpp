// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "rttloc/geometry.hpp"

#include <algorithm>
#include <vector>

namespace rttloc {
namespace {

double cross(Position o, Position a, Position b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Position p, Position q, Position r) {
    return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) && std::min(p.y, r.y) <= q.y &&
           q.y <= std::max(p.y, r.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

bool segments_intersect(const Segment& s, const Segment& t) {
    const int d1 = sign(cross(t.a, t.b, s.a));
    const int d2 = sign(cross(t.a, t.b, s.b));
    const int d3 = sign(cross(s.a, s.b, t.a));
    const int d4 = sign(cross(s.a, s.b, t.b));
    if (d1 * d2 < 0 && d3 * d4 < 0)
        return true;
    if (d1 == 0 && on_segment(t.a, s.a, t.b)) return true;
    if (d2 == 0 && on_segment(t.a, s.b, t.b)) return true;
    if (d3 == 0 && on_segment(s.a, t.a, s.b)) return true;
    if (d4 == 0 && on_segment(s.a, t.b, s.b)) return true;
    return false;
}

double point_set_diameter(std::span<const Position> points) {
    if (points.size() < 2)
        return 0.0;
    // Andrew's monotone chain, then brute force over the hull.
    std::vector<Position> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Position a, Position b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        return pts.size() == 2 ? distance(pts[0], pts[1]) : 0.0;
    }
    std::vector<Position> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0)
            --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j)
            best = std::max(best, distance(hull[i], hull[j]));
    // Collinear inputs collapse the hull to its two extremes.
    if (hull.size() < 2)
        best = distance(pts.front(), pts.back());
    return best;
}

} // namespace rttloc
