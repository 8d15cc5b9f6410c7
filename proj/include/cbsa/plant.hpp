#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cbsa/errors.hpp"
#include "cbsa/geometry.hpp"
#include "cbsa/value.hpp"

namespace cbsa {

// ============================================================================
// Inner-loop & plant: differential-drive kinematics, affine power model,
// battery, IR sensing with blind spots, power-station detection.
// ============================================================================

struct PlantParams {
    double wheel_radius = 0.0325;    ///< r, meters
    double wheelbase = 0.09925;      ///< l, meters (distance between wheel centers)
    double v_max = 0.8;              ///< m/s
    double omega_max = 7.0 * M_PI;   ///< rad/s
    int sensor_count = 8;            ///< N
    double sensor_fov = 5.0 * M_PI / 180.0;  ///< beta_s, radians per sensor cone
    double sensor_range = 0.8;       ///< R_s, meters
    double ps_detect_range = 0.1;    ///< d_PS, meters
    double battery_capacity = 100.0; ///< B_max
    double power_p1 = 0.15;          ///< energy per radian of wheel rotation
    double power_p2 = 0.01;          ///< idle drain, energy per second

    void validate() const {
        auto positive = [](double v, const char *what) {
            if (!(v > 0.0)) throw ValidationError(std::string("plant parameter ") + what + " must be positive");
        };
        positive(wheel_radius, "wheel_radius");
        positive(wheelbase, "wheelbase");
        positive(v_max, "v_max");
        positive(omega_max, "omega_max");
        positive(sensor_fov, "sensor_fov");
        positive(sensor_range, "sensor_range");
        positive(ps_detect_range, "ps_detect_range");
        positive(battery_capacity, "battery_capacity");
        positive(power_p1, "power_p1");
        positive(power_p2, "power_p2");
        if (sensor_count < 1) throw ValidationError("plant parameter sensor_count must be >= 1");
        if (sensor_fov * sensor_count >= 2.0 * M_PI)
            throw ValidationError("sensor coverage must leave blind spots (beta_s * N < 2*pi)");
    }
};

struct RoverState {
    Vec2 position;
    double heading = 0.0;   ///< radians
    double v = 0.0;         ///< linear velocity, m/s
    double omega = 0.0;     ///< angular velocity, rad/s
    double battery = 0.0;   ///< energy units
};

struct WheelCommand {
    double omega_l = 0.0;  ///< rad/s
    double omega_r = 0.0;  ///< rad/s
};

struct Obstacle {
    Polygon shape;
};

struct PowerStation {
    Vec2 location;
};

struct World {
    std::vector<Obstacle> obstacles;
    std::vector<PowerStation> stations;

    std::vector<Polygon> polygons() const {
        std::vector<Polygon> ps;
        ps.reserve(obstacles.size());
        for (const auto &o : obstacles) ps.push_back(o.shape);
        return ps;
    }
};

struct SensorReading {
    std::vector<double> ir;                   ///< per-sensor distance in [0, R_s]
    std::optional<std::size_t> detected_station;  ///< accessible station within d_PS
    double d_o = std::numeric_limits<double>::infinity();  ///< true min obstacle distance
};

/// Wheel speeds realizing (v, omega):
///   omega_l = (2v - omega*l) / (2r),  omega_r = (2v + omega*l) / (2r).
inline WheelCommand wheel_speeds(double v, double omega, const PlantParams &p) {
    if (v < 0.0 || v > p.v_max + 1e-12)
        throw BoundsError("linear velocity out of [0, v_max]");
    if (std::abs(omega) > p.omega_max + 1e-12)
        throw BoundsError("angular velocity out of [-omega_max, omega_max]");
    const double two_r = 2.0 * p.wheel_radius;
    return {(2.0 * v - omega * p.wheelbase) / two_r, (2.0 * v + omega * p.wheelbase) / two_r};
}

/// Affine power model P = p1 (|omega_l| + |omega_r|) + p2.
inline double power(const WheelCommand &cmd, const PlantParams &p) {
    return p.power_p1 * (std::abs(cmd.omega_l) + std::abs(cmd.omega_r)) + p.power_p2;
}

/// Worst-case wheel-speed magnitude sum over admissible (v, omega).
inline double max_wheel_speed_sum(const PlantParams &p) {
    return std::max(2.0 * p.v_max, p.omega_max * p.wheelbase) / p.wheel_radius;
}

/// Energy bound for one period of the given length with an arbitrary
/// controller: worst-case power times duration.
inline double derived_period_energy(const PlantParams &p, double period_seconds) {
    return (p.power_p1 * max_wheel_speed_sum(p) + p.power_p2) * period_seconds;
}

/// Energy needed to turn in place by pi, with rotation split into
/// full-rate command periods plus one remainder period.
inline double derived_turn_energy(const PlantParams &p, double nav_period_seconds) {
    const double turn_time = M_PI / p.omega_max;
    const double periods = std::ceil(turn_time / nav_period_seconds - 1e-12);
    // p1 term scales with total rotation angle; p2 with elapsed command time
    return p.power_p1 * (p.wheelbase / p.wheel_radius) * M_PI +
           p.power_p2 * periods * nav_period_seconds;
}

/// sin(x)/x, series-expanded near zero to avoid cancellation.
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

/// Closed-form constant-(v, omega) pose integration over t seconds.
///
/// The arc displacement (v/omega)(sin theta2 - sin theta1) is evaluated via
/// the half-angle identity as v t sinc(omega t / 2) in the chord direction,
/// which is exact, handles omega = 0 with no branch, and stays stable where
/// the naive sine difference cancels.
inline RoverState integrate_pose(const RoverState &s, double v, double omega, double t) {
    RoverState out = s;
    out.v = v;
    out.omega = omega;
    const double swept = omega * t;
    const double chord = v * t * sinc(0.5 * swept);
    out.position = s.position + chord * unit_from_angle(s.heading + 0.5 * swept);
    out.heading = s.heading + swept;
    return out;
}

/// Simulate the IR array, power-station detector and the exact obstacle
/// clearance d_o (the latter feeds the collision-freedom monitor only).
///
/// Sensor k covers a cone of half-angle beta_s/2 around body-frame heading
/// 2*pi*k/N; its reading is the exact minimum distance to any obstacle within
/// the cone, saturated at R_s. Obstacles outside every cone go unseen.
inline SensorReading sense(const RoverState &s, const World &world, const PlantParams &p) {
    SensorReading r;
    r.ir.assign(static_cast<std::size_t>(p.sensor_count), p.sensor_range);
    const double half = 0.5 * p.sensor_fov;
    for (int k = 0; k < p.sensor_count; ++k) {
        const double dir = s.heading + 2.0 * M_PI * k / p.sensor_count;
        double best = std::numeric_limits<double>::infinity();
        for (const Obstacle &ob : world.obstacles) {
            if (ob.shape.contains(s.position)) {
                best = 0.0;
                break;
            }
            const std::size_t n = ob.shape.size();
            for (std::size_t i = 0; i < n; ++i) {
                best = std::min(best, wedge_segment_distance(s.position, dir, half,
                                                             ob.shape.vertices[i],
                                                             ob.shape.vertex(i + 1)));
            }
        }
        if (best <= p.sensor_range) r.ir[static_cast<std::size_t>(k)] = best;
    }

    for (const Obstacle &ob : world.obstacles)
        r.d_o = std::min(r.d_o, ob.shape.distance_to(s.position));

    const auto polys = world.polygons();
    double best_station = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < world.stations.size(); ++i) {
        const double d = distance(s.position, world.stations[i].location);
        if (d <= p.ps_detect_range && d < best_station &&
            line_of_sight(s.position, world.stations[i].location, polys)) {
            best_station = d;
            r.detected_station = i;
        }
    }
    return r;
}

struct PlantStepResult {
    RoverState state;
    double consumed = 0.0;           ///< energy drawn from the battery this step
    bool recharged = false;          ///< battery restored to capacity
    std::optional<std::size_t> visited_station;  ///< station within d_PS with clear line of sight
    bool depleted = false;           ///< battery hit zero (energy-safety violation)
};

/// One plant update: clamp the commanded velocities, integrate the pose for
/// t seconds, drain the battery, then handle station proximity. Stations are
/// recorded whenever the rover passes within d_PS with line of sight; the
/// battery recharges to capacity only when `recharge_enabled` (recharge mode).
inline PlantStepResult plant_step(const RoverState &s, double v_target, double omega_target,
                                  const PlantParams &p, const World &world, double t,
                                  bool recharge_enabled) {
    PlantStepResult out;
    const double v = std::clamp(v_target, 0.0, p.v_max);
    const double omega = std::clamp(omega_target, -p.omega_max, p.omega_max);
    out.state = integrate_pose(s, v, omega, t);
    out.consumed = power(wheel_speeds(v, omega, p), p) * t;
    out.state.battery = s.battery - out.consumed;
    if (out.state.battery <= 0.0) {
        out.state.battery = 0.0;
        out.depleted = true;
    }

    const auto polys = world.polygons();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < world.stations.size(); ++i) {
        const double d = distance(out.state.position, world.stations[i].location);
        if (d <= p.ps_detect_range && d < best &&
            line_of_sight(out.state.position, world.stations[i].location, polys)) {
            best = d;
            out.visited_station = i;
        }
    }
    if (out.visited_station && recharge_enabled) {
        out.state.battery = p.battery_capacity;
        out.recharged = true;
        out.depleted = false;
    }
    return out;
}

} // namespace cbsa
