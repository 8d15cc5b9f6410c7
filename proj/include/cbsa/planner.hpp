#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "cbsa/errors.hpp"
#include "cbsa/grid_map.hpp"
#include "cbsa/value.hpp"

namespace cbsa {

// ============================================================================
// Mission completion: A* grid planning, the two-primitive baseline plans
// (turn in place, drive straight) and the certified traversal-time bounds
// feeding the mission-planning decision module.
// ============================================================================

/// Minimal-cost 8-connected path between two free cells, octile heuristic.
/// Throws Unreachable when no path exists.
inline std::vector<Cell> astar_path(const GridMap &map, Cell start, Cell goal) {
    if (!map.free(start) || !map.free(goal))
        throw Unreachable("path endpoints must be free cells");
    if (start == goal) return {start};

    const int w = map.width();
    const double straight = map.cell_size();
    const double diag = map.cell_size() * std::sqrt(2.0);
    auto heuristic = [&](Cell c) {
        const double dx = std::abs(c.x - goal.x);
        const double dy = std::abs(c.y - goal.y);
        return straight * (std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy));
    };

    const std::size_t n = static_cast<std::size_t>(w) * map.height();
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    using Item = std::pair<double, int>;  // (f, cell id)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;

    const int sid = static_cast<int>(map.index(start));
    g[static_cast<std::size_t>(sid)] = 0.0;
    open.push({heuristic(start), sid});
    while (!open.empty()) {
        const auto [f, id] = open.top();
        open.pop();
        (void)f;
        const Cell c{id % w, id / w};
        if (c == goal) break;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const Cell nb{c.x + dx, c.y + dy};
                if (!map.free(nb)) continue;
                const double step = (dx != 0 && dy != 0) ? diag : straight;
                const double ng = g[map.index(c)] + step;
                if (ng < g[map.index(nb)]) {
                    g[map.index(nb)] = ng;
                    parent[map.index(nb)] = id;
                    open.push({ng + heuristic(nb), static_cast<int>(map.index(nb))});
                }
            }
        }
    }
    if (!std::isfinite(g[map.index(goal)])) throw Unreachable("no grid path to the goal");

    std::vector<Cell> path;
    for (int id = static_cast<int>(map.index(goal)); id != -1;
         id = parent[static_cast<std::size_t>(id)])
        path.push_back({id % w, id / w});
    std::reverse(path.begin(), path.end());
    return path;
}

inline double path_cost(const GridMap &map, const std::vector<Cell> &path) {
    double c = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const bool diag = path[i].x != path[i - 1].x && path[i].y != path[i - 1].y;
        c += diag ? map.cell_size() * std::sqrt(2.0) : map.cell_size();
    }
    return c;
}

// ----------------------------------------------------------------------------
// primitive plans
// ----------------------------------------------------------------------------

struct PrimitiveSegment {
    enum class Kind { Turn, Straight };
    Kind kind = Kind::Straight;
    double value = 0.0;  ///< signed radians for turns, meters for straights
};

struct McParams {
    double v_bc = 0.4;      ///< straight-drive speed of the baseline controller
    double omega_bc = M_PI; ///< turn-in-place speed
    double eps_t = 0.1;     ///< per-primitive overhead (one Navigation period)
};

struct PrimitivePlan {
    std::vector<PrimitiveSegment> segments;
    double duration = 0.0;  ///< exact continuous traversal time, no overhead
    Vec2 end;

    double bound(const McParams &mc) const {
        return duration + eps_total(mc);
    }
    double eps_total(const McParams &mc) const {
        return mc.eps_t * static_cast<double>(segments.size());
    }
};

/// Collapse collinear runs of path cells into polyline vertices.
inline std::vector<Vec2> merged_vertices(const GridMap &map, const std::vector<Cell> &path) {
    std::vector<Vec2> verts;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i >= 2) {
            const int dx1 = path[i - 1].x - path[i - 2].x, dy1 = path[i - 1].y - path[i - 2].y;
            const int dx2 = path[i].x - path[i - 1].x, dy2 = path[i].y - path[i - 1].y;
            if (dx1 == dx2 && dy1 == dy2) {
                verts.back() = map.cell_center(path[i]);
                continue;
            }
        }
        verts.push_back(map.cell_center(path[i]));
    }
    return verts;
}

namespace detail {

/// Build turn/straight segments through the vertices. A non-finite
/// start_heading requests the worst-case initial turn of pi (used when the
/// heading at the start position is unknown, e.g. for reachability bounds).
inline PrimitivePlan plan_through(std::vector<Vec2> verts, double start_heading,
                                  const McParams &mc) {
    PrimitivePlan plan;
    if (verts.empty()) return plan;
    plan.end = verts.back();
    double heading = start_heading;
    Vec2 pos = verts.front();
    bool worst_first_turn = !std::isfinite(start_heading);
    for (std::size_t i = 1; i < verts.size(); ++i) {
        const Vec2 d = verts[i] - pos;
        const double len = d.norm();
        if (len < 1e-12) continue;
        const double to = std::atan2(d.y, d.x);
        double turn;
        if (worst_first_turn) {
            turn = M_PI;
            worst_first_turn = false;
        } else {
            turn = wrap_angle(to - heading);
        }
        if (std::abs(turn) > 1e-12) {
            plan.segments.push_back({PrimitiveSegment::Kind::Turn, turn});
            plan.duration += std::abs(turn) / mc.omega_bc;
        }
        plan.segments.push_back({PrimitiveSegment::Kind::Straight, len});
        plan.duration += len / mc.v_bc;
        heading = to;
        pos = verts[i];
    }
    return plan;
}

} // namespace detail

/// Baseline plan from an exact pose to an exact goal position: snap into the
/// grid if needed, follow the A* polyline, finish on the goal point.
inline PrimitivePlan plan_route(const GridMap &map, Vec2 from, double heading, Vec2 to,
                                const McParams &mc) {
    const auto sc = map.nearest_free(map.cell_of(from));
    const auto gc = map.nearest_free(map.cell_of(to));
    if (!sc || !gc) throw Unreachable("no free cell near a route endpoint");
    std::vector<Cell> path = astar_path(map, *sc, *gc);
    std::vector<Vec2> verts = merged_vertices(map, path);
    verts.insert(verts.begin(), from);
    verts.push_back(to);
    return detail::plan_through(std::move(verts), heading, mc);
}

/// Certified upper bound tu(a, b) on the baseline traversal time, valid for
/// any initial heading: worst-case first turn plus the plan legs plus one
/// eps_t per primitive (absorbing period quantization).
inline double time_upper_bound(const GridMap &map, Vec2 a, Vec2 b, const McParams &mc) {
    const auto sc = map.nearest_free(map.cell_of(a));
    const auto gc = map.nearest_free(map.cell_of(b));
    if (!sc || !gc) throw Unreachable("no free cell near a bound endpoint");
    if (distance(a, b) < 1e-12) return 0.0;
    std::vector<Cell> path = astar_path(map, *sc, *gc);
    std::vector<Vec2> verts = merged_vertices(map, path);
    verts.insert(verts.begin(), a);
    verts.push_back(b);
    const PrimitivePlan plan =
        detail::plan_through(std::move(verts), std::numeric_limits<double>::quiet_NaN(), mc);
    return plan.bound(mc);
}

/// tu summed along the remaining target sequence.
inline double mission_time_bound(const GridMap &map, Vec2 p, const std::vector<Vec2> &targets,
                                 const McParams &mc) {
    if (targets.empty()) return 0.0;
    double total = time_upper_bound(map, p, targets.front(), mc);
    for (std::size_t i = 0; i + 1 < targets.size(); ++i)
        total += time_upper_bound(map, targets[i], targets[i + 1], mc);
    return total;
}

/// Grid cells intersecting the disk reachable within one mission-planning
/// period.
inline std::vector<Cell> reachable_region(const GridMap &map, Vec2 p, double radius) {
    std::vector<Cell> cells;
    const Cell c0 = map.cell_of(p);
    const int r = static_cast<int>(std::ceil(radius / map.cell_size())) + 1;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const Cell c{c0.x + dx, c0.y + dy};
            if (!map.in_bounds(c)) continue;
            const Vec2 lo{map.cell_center(c).x - 0.5 * map.cell_size(),
                          map.cell_center(c).y - 0.5 * map.cell_size()};
            const Vec2 hi{lo.x + map.cell_size(), lo.y + map.cell_size()};
            const double cx = std::clamp(p.x, lo.x, hi.x);
            const double cy = std::clamp(p.y, lo.y, hi.y);
            if (std::hypot(p.x - cx, p.y - cy) <= radius) cells.push_back(c);
        }
    }
    return cells;
}

/// Memo for mission_time_bound keyed by (cell, remaining-target count); the
/// target list only ever shrinks from the front, so the count identifies the
/// suffix.
using BoundCache = std::map<std::pair<std::size_t, std::size_t>, double>;

/// Decision condition for the mission-completion property: stay on the
/// advanced controller only while every position reachable within one period
/// still allows the baseline to finish in time. Unreachable positions force
/// an immediate switch.
inline bool mc_dm_switch(const GridMap &map, Vec2 p, const std::vector<Vec2> &targets,
                         double remaining_time, double mp_period_seconds, double reach_radius,
                         const McParams &mc, BoundCache *cache = nullptr) {
    if (targets.empty()) return false;
    if (remaining_time <= 0.0) return true;

    double suffix = 0.0;
    for (std::size_t i = 0; i + 1 < targets.size(); ++i)
        suffix += time_upper_bound(map, targets[i], targets[i + 1], mc);

    double worst = 0.0;
    try {
        for (const Cell c : reachable_region(map, p, reach_radius)) {
            double first;
            const auto key = std::make_pair(map.index(c), targets.size());
            if (cache && cache->count(key)) {
                first = cache->at(key);
            } else {
                first = time_upper_bound(map, map.cell_center(c), targets.front(), mc);
                if (cache) (*cache)[key] = first;
            }
            worst = std::max(worst, first + suffix);
        }
    } catch (const Unreachable &) {
        return true;  // cannot certify the baseline from somewhere reachable
    }
    return !(worst < remaining_time - mp_period_seconds);
}

} // namespace cbsa
