#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cbsa/errors.hpp"
#include "cbsa/plant.hpp"
#include "cbsa/simplex.hpp"
#include "cbsa/value.hpp"

namespace cbsa {

// ============================================================================
// Navigation: go-to-target steering, stop-based obstacle avoidance, the
// collision-freedom decision, waypoint recording and least-squares
// backtracking through the recorded log.
// ============================================================================

/// Commanded target velocities handed to the inner loop.
struct NavCommand {
    double v = 0.0;
    double omega = 0.0;
};

/// Gains of the go-to-target law. The law is proportional heading control
/// with a cosine speed taper and a short linear ramp near the target so that
/// discrete sampling settles inside the arrival radius.
struct NavGains {
    double heading_gain = 10.0;    ///< rad/s per rad of heading error
    double arrival_radius = 0.02;  ///< meters
    double approach_ramp = 0.1;    ///< begin slowing inside this distance
};

/// Steer toward `target`: omega proportional to the wrapped heading error,
/// speed tapered by cos(error) and ramped down on final approach.
inline NavCommand go_to_target(const RoverState &s, Vec2 target, const PlantParams &p,
                               const NavGains &g = {}) {
    const Vec2 to = target - s.position;
    const double dist = to.norm();
    if (dist < 1e-12) return {0.0, 0.0};
    const double err = wrap_angle(std::atan2(to.y, to.x) - s.heading);
    NavCommand cmd;
    cmd.omega = std::clamp(g.heading_gain * err, -p.omega_max, p.omega_max);
    double v = p.v_max * std::max(0.0, std::cos(err));
    if (dist < g.approach_ramp) v = std::min(v, p.v_max * dist / g.approach_ramp);
    cmd.v = v;
    return cmd;
}

/// The certified stop controller.
inline NavCommand avoid_obstacles(const RoverState &) { return {0.0, 0.0}; }

/// Collision-freedom decision: stop when the rover could close to within the
/// safety margin of a sensed obstacle before the next decision.
/// Returns BC (stop) iff min(ir) - v_max * t_nav <= margin.
inline Ctlr cf_dm(const std::vector<double> &ir, const PlantParams &p, double t_nav,
                  double margin) {
    double min_ir = p.sensor_range;
    for (double d : ir) min_ir = std::min(min_ir, d);
    return (min_ir - p.v_max * t_nav <= margin) ? Ctlr::BC : Ctlr::AC;
}

// ----------------------------------------------------------------------------
// inverse kinematics
// ----------------------------------------------------------------------------

struct ArcCommand {
    double v = 0.0;
    double omega = 0.0;
};

/// Solve the one-period inverse kinematics from pose A to pose B in t
/// seconds, least squares in v.
///
/// With equal headings the solution is omega = 0 and v the signed projection
/// of the displacement on the heading. Otherwise omega = dtheta / t exactly
/// (third kinematics equation) and v minimizes the squared residual of the
/// two position equations.
inline ArcCommand solve_arc(Vec2 a_pos, double a_heading, Vec2 b_pos, double b_heading,
                            double t) {
    if (!(t > 0.0)) throw BoundsError("solve_arc requires t > 0");
    const double dtheta = wrap_angle(b_heading - a_heading);
    const Vec2 d = b_pos - a_pos;
    if (dtheta == 0.0) {
        return {d.dot(unit_from_angle(a_heading)) / t, 0.0};
    }
    // chord form of the position equations (stable for small dtheta):
    //   dx = v t sinc(dtheta/2) cos(mid),  dy = v t sinc(dtheta/2) sin(mid)
    const double omega = dtheta / t;
    const double scale = t * sinc(0.5 * dtheta);
    const Vec2 dir = unit_from_angle(a_heading + 0.5 * dtheta);
    const double ax = scale * dir.x;
    const double ay = scale * dir.y;
    const double v = (ax * d.x + ay * d.y) / (ax * ax + ay * ay);
    return {v, omega};
}

/// Squared position residual of Eq-style kinematics for a candidate v with
/// omega fixed; used by tests to cross-check least-squares optimality.
inline double arc_residual(Vec2 a_pos, double a_heading, Vec2 b_pos, double b_heading,
                           double t, double v) {
    const double dtheta = wrap_angle(b_heading - a_heading);
    const double chord = v * t * sinc(0.5 * dtheta);
    const Vec2 reached = a_pos + chord * unit_from_angle(a_heading + 0.5 * dtheta);
    return (reached - b_pos).norm_sq();
}

// ----------------------------------------------------------------------------
// waypoint log
// ----------------------------------------------------------------------------

using WaypointLog = std::vector<PoseStamp>;

/// Append the current pose; called once per Navigation period while the
/// mission planner is on its advanced controller.
inline WaypointLog record_waypoint(WaypointLog log, Vec2 position, double heading,
                                   std::int64_t tick) {
    log.push_back({position, heading, tick});
    return log;
}

/// Reset the log at a power-station visit; the anchor is the visit pose.
inline WaypointLog anchored_log(Vec2 position, double heading, std::int64_t tick) {
    return {{position, heading, tick}};
}

/// Command to retrace one recorded leg: drive from the current pose (already
/// reversed) to the waypoint with its heading reversed.
inline ArcCommand backtrack_leg(Vec2 position, double heading, const PoseStamp &wp, double t_nav,
                                const PlantParams &p) {
    ArcCommand arc = solve_arc(position, heading, wp.pos, wp.heading + M_PI, t_nav);
    arc.v = std::clamp(arc.v, 0.0, p.v_max);
    arc.omega = std::clamp(arc.omega, -p.omega_max, p.omega_max);
    return arc;
}

/// Pop the most recent waypoint and command the arc to it (strictly LIFO, one
/// waypoint per Navigation period). Throws EmptyLog when nothing remains.
inline ArcCommand backtrack_step(Vec2 position, double heading, WaypointLog &log, double t_nav,
                                 const PlantParams &p) {
    if (log.empty()) throw EmptyLog("backtrack requested on an empty waypoint log");
    const PoseStamp wp = log.back();
    log.pop_back();
    return backtrack_leg(position, heading, wp, t_nav, p);
}

inline double command_energy(const ArcCommand &c, const PlantParams &p, double t) {
    return power(wheel_speeds(std::clamp(c.v, 0.0, p.v_max),
                              std::clamp(c.omega, -p.omega_max, p.omega_max), p),
                 p) *
           t;
}

/// Energy needed to retrace the whole log from the given pose, one period per
/// waypoint. The pose is the rover's current (forward-frame) pose; legs are
/// evaluated in the reversed frame.
inline double backtrack_energy_estimate(Vec2 position, double heading, const WaypointLog &log,
                                        const PlantParams &p, double t_nav) {
    if (log.empty()) return 0.0;
    double total = 0.0;
    Vec2 pos = position;
    double head = heading + M_PI;
    for (auto it = log.rbegin(); it != log.rend(); ++it) {
        total += command_energy(backtrack_leg(pos, head, *it, t_nav, p), p, t_nav);
        pos = it->pos;
        head = it->heading + M_PI;
    }
    return total;
}

/// Incremental version of backtrack_energy_estimate: per-leg energies are
/// cached against the log so each tick costs O(1). Exact because every cached
/// leg depends only on its two adjacent log entries.
class BacktrackEnergyTracker {
  public:
    double update(Vec2 position, double heading, const WaypointLog &log, const PlantParams &p,
                  double t_nav) {
        if (log.empty()) {
            legs_.clear();
            anchor_tick_ = -1;
            return 0.0;
        }
        if (anchor_tick_ != log.front().tick) rebuild(log, p, t_nav);
        while (legs_.size() > log.size() - 1) {  // waypoints were consumed
            sum_ -= legs_.back();
            legs_.pop_back();
        }
        while (legs_.size() < log.size() - 1) {  // waypoints were recorded
            const std::size_t i = legs_.size();  // leg from log[i+1] back to log[i]
            const PoseStamp &from = log[i + 1];
            legs_.push_back(
                command_energy(backtrack_leg(from.pos, from.heading + M_PI, log[i], t_nav, p), p,
                               t_nav));
            sum_ += legs_.back();
        }
        const double head = command_energy(
            backtrack_leg(position, heading + M_PI, log.back(), t_nav, p), p, t_nav);
        return head + sum_;
    }

  private:
    void rebuild(const WaypointLog &log, const PlantParams &p, double t_nav) {
        anchor_tick_ = log.front().tick;
        legs_.clear();
        sum_ = 0.0;
        for (std::size_t i = 0; i + 1 < log.size(); ++i) {
            const PoseStamp &from = log[i + 1];
            legs_.push_back(
                command_energy(backtrack_leg(from.pos, from.heading + M_PI, log[i], t_nav, p), p,
                               t_nav));
            sum_ += legs_.back();
        }
    }

    std::vector<double> legs_;
    double sum_ = 0.0;
    std::int64_t anchor_tick_ = -1;
};

// ----------------------------------------------------------------------------
// Navigation controller state machine
// ----------------------------------------------------------------------------

/// Mode of the Navigation component for one period.
enum class NavMode : int {
    GoToTarget = 0,  ///< AC2: advanced go-to-target controller
    CfStop = 1,      ///< BC2: certified stop (collision freedom)
    Turn = 2,        ///< BC1: 180-degree in-place turn before backtracking
    Backtrack = 3,   ///< BC1: retrace the waypoint log
    Hold = 4,        ///< BC1: log exhausted, waiting at the anchor
};

struct NavConfig {
    NavGains gains;
    double cf_margin = 0.05;  ///< delta, meters
    double t_nav = 0.1;       ///< Navigation period in seconds
};

struct NavState {
    NavMode mode = NavMode::GoToTarget;
    double turn_remaining = 0.0;  ///< radians left of the 180-degree turn
    WaypointLog log;
};

struct NavDecision {
    NavCommand command;
    NavState state;
    bool backtrack_arrived = false;   ///< log exhausted this period
    bool backtrack_empty_far = false; ///< exhausted away from any station (diagnostic)
};

/// One Navigation period. `ctlr` is the hardwired mission-planning decision
/// signal (coordinated switching); `ps_visit` marks a station visit seen by
/// the plant last tick.
inline NavDecision nav_tick(const RoverState &s, Vec2 target, Ctlr ctlr,
                            const std::vector<double> &ir, bool ps_visit, bool near_station,
                            NavState state, std::int64_t tick, const PlantParams &p,
                            const NavConfig &cfg) {
    NavDecision out;
    out.state = std::move(state);

    if (ctlr == Ctlr::BC) {
        const bool in_bc =
            out.state.mode == NavMode::Turn || out.state.mode == NavMode::Backtrack ||
            out.state.mode == NavMode::Hold;
        if (!in_bc) {
            out.state.mode = NavMode::Turn;
            out.state.turn_remaining = M_PI;
        }
        if (out.state.mode == NavMode::Turn) {
            if (out.state.turn_remaining > 1e-12) {
                const double chunk = std::min(p.omega_max * cfg.t_nav, out.state.turn_remaining);
                out.command = {0.0, chunk / cfg.t_nav};
                out.state.turn_remaining -= chunk;
                if (out.state.turn_remaining <= 1e-12) out.state.turn_remaining = 0.0;
                return out;  // the period belongs to the turn even for the last chunk
            }
            out.state.mode = NavMode::Backtrack;
        }
        if (out.state.mode == NavMode::Backtrack) {
            if (out.state.log.empty()) {
                out.state.mode = NavMode::Hold;
                out.backtrack_arrived = true;
                out.backtrack_empty_far = !near_station;
                out.command = {0.0, 0.0};
                return out;
            }
            const ArcCommand arc =
                backtrack_step(s.position, s.heading, out.state.log, cfg.t_nav, p);
            out.command = {arc.v, arc.omega};
            return out;
        }
        out.command = {0.0, 0.0};  // Hold
        return out;
    }

    // ctlr == AC: resume the nested collision-freedom Simplex
    if (ps_visit) {
        out.state.log = anchored_log(s.position, s.heading, tick);
    } else {
        out.state.log = record_waypoint(std::move(out.state.log), s.position, s.heading, tick);
    }
    if (cf_dm(ir, p, cfg.t_nav, cfg.cf_margin) == Ctlr::BC) {
        out.state.mode = NavMode::CfStop;
        out.command = avoid_obstacles(s);
    } else {
        out.state.mode = NavMode::GoToTarget;
        out.command = go_to_target(s, target, p, cfg.gains);
    }
    return out;
}

} // namespace cbsa
