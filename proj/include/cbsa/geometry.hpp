#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cbsa/value.hpp"

namespace cbsa {

inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

/// Distance from point p to segment [a, b].
inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len_sq = d.norm_sq();
    if (len_sq == 0.0) return distance(p, a);
    double t = (p - a).dot(d) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + t * d);
}

/// Proper segment-segment intersection test (touching counts as intersecting).
inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
        const double v = (b - a).cross(c - a);
        if (v > 0) return 1;
        if (v < 0) return -1;
        return 0;
    };
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
    };
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

/// Minimum distance between two segments.
inline double segment_segment_distance(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    if (segments_intersect(p1, p2, q1, q2)) return 0.0;
    return std::min(std::min(point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)),
                    std::min(point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2)));
}

/// Simple polygon given by its vertices in order (either winding).
struct Polygon {
    std::vector<Vec2> vertices;

    std::size_t size() const { return vertices.size(); }

    Vec2 vertex(std::size_t i) const { return vertices[i % vertices.size()]; }

    bool contains(Vec2 p) const {
        // even-odd ray crossing
        bool inside = false;
        const std::size_t n = vertices.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2 a = vertices[i];
            const Vec2 b = vertices[j];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
                if (p.x < x_cross) inside = !inside;
            }
        }
        return inside;
    }

    /// Distance from p to the polygon (zero inside).
    double distance_to(Vec2 p) const {
        if (contains(p)) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i)
            best = std::min(best, point_segment_distance(p, vertices[i], vertex(i + 1)));
        return best;
    }

    double signed_area() const {
        double a = 0.0;
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) a += vertices[i].cross(vertex(i + 1));
        return 0.5 * a;
    }

    /// Internal angle at vertex i in radians.
    double internal_angle(std::size_t i) const {
        const std::size_t n = vertices.size();
        const Vec2 prev = vertices[(i + n - 1) % n];
        const Vec2 cur = vertices[i];
        const Vec2 next = vertices[(i + 1) % n];
        const Vec2 u = prev - cur;
        const Vec2 w = next - cur;
        // interior lies to the left of the boundary for counter-clockwise
        // winding: measure from the outgoing edge w around to the incoming u
        double ang = std::atan2(w.cross(u), w.dot(u));
        if (signed_area() < 0) ang = -ang;
        if (ang < 0) ang += 2.0 * M_PI;
        return ang;
    }

    double min_internal_angle() const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vertices.size(); ++i) best = std::min(best, internal_angle(i));
        return best;
    }

    double min_edge_length() const {
        double best = std::numeric_limits<double>::infinity();
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) best = std::min(best, distance(vertices[i], vertex(i + 1)));
        return best;
    }

    bool is_simple() const {
        const std::size_t n = vertices.size();
        if (n < 3) return false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                // skip adjacent edges (they share a vertex)
                if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
                if (segments_intersect(vertices[i], vertex(i + 1), vertices[j], vertex(j + 1)))
                    return false;
            }
        }
        return true;
    }
};

inline double polygon_polygon_distance(const Polygon &a, const Polygon &b) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            best = std::min(best, segment_segment_distance(a.vertices[i], a.vertex(i + 1),
                                                           b.vertices[j], b.vertex(j + 1)));
    return best;
}

/// Minimum distance from `origin` to the part of segment [a, b] lying inside
/// the wedge centered on `direction` with the given half-angle. Returns
/// infinity when the clipped segment is empty. Half-angle must be < pi/2.
inline double wedge_segment_distance(Vec2 origin, double direction, double half_angle,
                                     Vec2 a, Vec2 b) {
    const Vec2 left = unit_from_angle(direction + half_angle);
    const Vec2 right = unit_from_angle(direction - half_angle);
    const Vec2 A = a - origin;
    const Vec2 d = b - a;

    // inside iff cross(right, q) >= 0 and cross(q, left) >= 0
    double t0 = 0.0, t1 = 1.0;
    auto clip = [&](double alpha, double beta) {
        // constraint alpha + t * beta >= 0
        constexpr double kEps = 1e-15;
        if (std::abs(beta) < kEps) {
            if (alpha < 0.0) t0 = 1.0, t1 = 0.0;  // empty
            return;
        }
        const double t = -alpha / beta;
        if (beta > 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
    };
    clip(right.cross(A), right.cross(d));
    clip(A.cross(left), d.cross(left));
    if (t0 > t1) return std::numeric_limits<double>::infinity();
    return point_segment_distance({0.0, 0.0}, A + t0 * d, A + t1 * d);
}

/// True when the open segment from `from` to `to` crosses no polygon edge.
inline bool line_of_sight(Vec2 from, Vec2 to, const std::vector<Polygon> &polys) {
    for (const Polygon &poly : polys) {
        for (std::size_t i = 0; i < poly.size(); ++i)
            if (segments_intersect(from, to, poly.vertices[i], poly.vertex(i + 1))) return false;
    }
    return true;
}

} // namespace cbsa
