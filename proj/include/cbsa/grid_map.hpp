#pragma once

#include <cmath>
#include <vector>

#include "cbsa/errors.hpp"
#include "cbsa/geometry.hpp"
#include "cbsa/value.hpp"

namespace cbsa {

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(Cell a, Cell b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(Cell a, Cell b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }
};

/// Occupancy grid rasterized from obstacle polygons with an inflation margin.
/// A cell is occupied when any point of it lies within `inflation` of an
/// obstacle, so paths through free cell centers keep positive clearance.
class GridMap {
  public:
    GridMap() = default;

    static GridMap rasterize(Vec2 lower, Vec2 upper, double cell_size,
                             const std::vector<Polygon> &obstacles, double inflation) {
        if (!(cell_size > 0.0)) throw ValidationError("grid cell size must be positive");
        if (!(upper.x > lower.x) || !(upper.y > lower.y))
            throw ValidationError("grid bounds must be a non-empty rectangle");
        GridMap g;
        g.cell_size_ = cell_size;
        g.origin_ = lower;
        g.inflation_ = inflation;
        g.width_ = static_cast<int>(std::ceil((upper.x - lower.x) / cell_size));
        g.height_ = static_cast<int>(std::ceil((upper.y - lower.y) / cell_size));
        g.occupied_.assign(static_cast<std::size_t>(g.width_) * g.height_, false);
        const double reach = inflation + 0.5 * cell_size * std::sqrt(2.0);
        for (int y = 0; y < g.height_; ++y) {
            for (int x = 0; x < g.width_; ++x) {
                const Vec2 c = g.cell_center({x, y});
                for (const Polygon &poly : obstacles) {
                    if (poly.distance_to(c) <= reach) {
                        g.occupied_[g.index({x, y})] = true;
                        break;
                    }
                }
            }
        }
        return g;
    }

    double cell_size() const { return cell_size_; }
    double inflation() const { return inflation_; }
    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }
    bool occupied(Cell c) const { return occupied_[index(c)]; }
    bool free(Cell c) const { return in_bounds(c) && !occupied(c); }

    Cell cell_of(Vec2 p) const {
        return {static_cast<int>(std::floor((p.x - origin_.x) / cell_size_)),
                static_cast<int>(std::floor((p.y - origin_.y) / cell_size_))};
    }

    Vec2 cell_center(Cell c) const {
        return {origin_.x + (c.x + 0.5) * cell_size_, origin_.y + (c.y + 0.5) * cell_size_};
    }

    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.y) * width_ + c.x;
    }

    /// Nearest free cell to `c` within `max_rings` of Chebyshev distance.
    /// Returns c itself when it is free.
    std::optional<Cell> nearest_free(Cell c, int max_rings = 2) const {
        if (free(c)) return c;
        for (int r = 1; r <= max_rings; ++r) {
            Cell best{};
            double best_d = std::numeric_limits<double>::infinity();
            bool found = false;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
                    const Cell n{c.x + dx, c.y + dy};
                    if (!free(n)) continue;
                    const double d = distance(cell_center(c), cell_center(n));
                    if (d < best_d) {
                        best_d = d;
                        best = n;
                        found = true;
                    }
                }
            }
            if (found) return best;
        }
        return std::nullopt;
    }

  private:
    double cell_size_ = 0.05;
    double inflation_ = 0.0;
    Vec2 origin_;
    int width_ = 0;
    int height_ = 0;
    std::vector<bool> occupied_;
};

} // namespace cbsa
