#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cbsa/errors.hpp"

namespace cbsa {

/// 2-D vector in world coordinates (meters).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    /// z-component of the 3-D cross product.
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// A recorded pose: position, heading and the global tick it was taken at.
struct PoseStamp {
    Vec2 pos;
    double heading = 0.0;
    std::int64_t tick = 0;

    friend bool operator==(const PoseStamp &a, const PoseStamp &b) {
        return a.pos == b.pos && a.heading == b.heading && a.tick == b.tick;
    }
};

/// Variable values exchanged between components: tagged scalars, 2-vectors,
/// scalar sequences (sensor arrays) and pose sequences (waypoint logs).
using Value = std::variant<double, Vec2, std::vector<double>, std::vector<PoseStamp>>;

inline bool value_equal(const Value &a, const Value &b) { return a == b; }

inline double as_scalar(const Value &v, const std::string &name = "") {
    if (const double *p = std::get_if<double>(&v)) return *p;
    throw TypeMismatch("variable '" + name + "' is not a scalar");
}

inline Vec2 as_vec2(const Value &v, const std::string &name = "") {
    if (const Vec2 *p = std::get_if<Vec2>(&v)) return *p;
    throw TypeMismatch("variable '" + name + "' is not a 2-vector");
}

inline const std::vector<double> &as_seq(const Value &v, const std::string &name = "") {
    if (const auto *p = std::get_if<std::vector<double>>(&v)) return *p;
    throw TypeMismatch("variable '" + name + "' is not a scalar sequence");
}

inline const std::vector<PoseStamp> &as_poses(const Value &v, const std::string &name = "") {
    if (const auto *p = std::get_if<std::vector<PoseStamp>>(&v)) return *p;
    throw TypeMismatch("variable '" + name + "' is not a pose sequence");
}

/// Normalize an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

} // namespace cbsa
