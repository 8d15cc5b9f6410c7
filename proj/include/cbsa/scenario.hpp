#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbsa/errors.hpp"
#include "cbsa/mission_es.hpp"
#include "cbsa/navigation.hpp"
#include "cbsa/planner.hpp"
#include "cbsa/plant.hpp"

namespace cbsa {

enum class ScenarioMode { EsCf, Mc };

/// Structural limits the world must respect (the modeling assumptions about
/// obstacles and stations made by the safety arguments).
struct WorldLimits {
    double min_internal_angle = 30.0 * M_PI / 180.0;
    double min_edge_length = 0.05;
    double min_separation = 0.2;
};

struct StartPose {
    Vec2 position;
    double heading = 0.0;
    std::optional<double> battery;  ///< defaults to full capacity
};

struct McConfig {
    double cell_size = 0.05;
    Vec2 bounds_lower{-2.0, -2.0};
    Vec2 bounds_upper{2.0, 2.0};
    double deadline = 60.0;
    McParams params;
    std::string ac = "direct";  ///< "direct" or "detour"
    bool precompute_cache = true;
};

/// A declarative run: world geometry, mission inputs and all tunables.
struct Scenario {
    std::string name;
    ScenarioMode mode = ScenarioMode::EsCf;
    double dt = 0.05;
    std::int64_t period_mp = 4;
    std::int64_t period_nav = 2;
    std::int64_t period_plant = 1;
    std::int64_t max_ticks = 20000;
    std::uint64_t seed = 1;

    PlantParams plant;
    EnergyConstants energy;
    NavConfig nav;  ///< t_nav derived at load time
    StartPose start;
    std::vector<Vec2> targets;
    std::vector<PowerStation> stations;
    std::vector<Obstacle> obstacles;
    WorldLimits limits;
    McConfig mc;

    double mp_period_seconds() const { return dt * static_cast<double>(period_mp); }
    double nav_period_seconds() const { return dt * static_cast<double>(period_nav); }
    double start_battery() const { return start.battery.value_or(plant.battery_capacity); }

    World world() const {
        World w;
        w.obstacles = obstacles;
        w.stations = stations;
        return w;
    }
};

// ----------------------------------------------------------------------------
// parsing
// ----------------------------------------------------------------------------

namespace detail {

inline Vec2 parse_vec2(const nlohmann::json &j, const std::string &what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(what + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
void read_if(const nlohmann::json &j, const char *key, T &out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

inline Scenario parse_scenario(const nlohmann::json &j) {
    using detail::parse_vec2;
    using detail::read_if;
    Scenario s;
    try {
        read_if(j, "name", s.name);
        if (j.contains("mode")) {
            const std::string m = j.at("mode").get<std::string>();
            if (m == "es_cf")
                s.mode = ScenarioMode::EsCf;
            else if (m == "mc")
                s.mode = ScenarioMode::Mc;
            else
                throw ParseError("mode must be \"es_cf\" or \"mc\"");
        }
        read_if(j, "dt", s.dt);
        if (j.contains("periods")) {
            const auto &p = j.at("periods");
            read_if(p, "mission_planning", s.period_mp);
            read_if(p, "navigation", s.period_nav);
            read_if(p, "plant", s.period_plant);
        }
        read_if(j, "max_ticks", s.max_ticks);
        read_if(j, "seed", s.seed);

        if (j.contains("plant")) {
            const auto &p = j.at("plant");
            read_if(p, "wheel_radius", s.plant.wheel_radius);
            read_if(p, "wheelbase", s.plant.wheelbase);
            read_if(p, "v_max", s.plant.v_max);
            read_if(p, "omega_max", s.plant.omega_max);
            read_if(p, "sensor_count", s.plant.sensor_count);
            read_if(p, "sensor_fov", s.plant.sensor_fov);
            read_if(p, "sensor_range", s.plant.sensor_range);
            read_if(p, "ps_detect_range", s.plant.ps_detect_range);
            read_if(p, "battery_capacity", s.plant.battery_capacity);
            read_if(p, "power_p1", s.plant.power_p1);
            read_if(p, "power_p2", s.plant.power_p2);
        }
        if (j.contains("energy")) {
            const auto &e = j.at("energy");
            read_if(e, "e_mp", s.energy.e_mp);
            read_if(e, "e_180", s.energy.e_180);
            read_if(e, "be_mp", s.energy.be_mp);
            read_if(e, "eps_be", s.energy.eps_be);
        }
        if (j.contains("nav")) {
            const auto &n = j.at("nav");
            read_if(n, "cf_margin", s.nav.cf_margin);
            read_if(n, "heading_gain", s.nav.gains.heading_gain);
            read_if(n, "arrival_radius", s.nav.gains.arrival_radius);
            read_if(n, "approach_ramp", s.nav.gains.approach_ramp);
        }
        if (j.contains("start")) {
            const auto &st = j.at("start");
            if (st.contains("position")) s.start.position = parse_vec2(st.at("position"), "start.position");
            read_if(st, "heading", s.start.heading);
            if (st.contains("battery")) s.start.battery = st.at("battery").get<double>();
        }
        if (j.contains("targets"))
            for (const auto &t : j.at("targets")) s.targets.push_back(parse_vec2(t, "target"));
        if (j.contains("stations"))
            for (const auto &t : j.at("stations")) s.stations.push_back({parse_vec2(t, "station")});
        if (j.contains("obstacles")) {
            for (const auto &o : j.at("obstacles")) {
                Obstacle ob;
                for (const auto &v : o.at("vertices"))
                    ob.shape.vertices.push_back(parse_vec2(v, "obstacle vertex"));
                s.obstacles.push_back(std::move(ob));
            }
        }
        if (j.contains("limits")) {
            const auto &l = j.at("limits");
            read_if(l, "min_internal_angle", s.limits.min_internal_angle);
            read_if(l, "min_edge_length", s.limits.min_edge_length);
            read_if(l, "min_separation", s.limits.min_separation);
        }
        if (j.contains("mc")) {
            const auto &m = j.at("mc");
            read_if(m, "cell_size", s.mc.cell_size);
            if (m.contains("bounds")) {
                s.mc.bounds_lower = parse_vec2(m.at("bounds")[0], "mc.bounds[0]");
                s.mc.bounds_upper = parse_vec2(m.at("bounds")[1], "mc.bounds[1]");
            }
            read_if(m, "deadline", s.mc.deadline);
            read_if(m, "v_bc", s.mc.params.v_bc);
            read_if(m, "omega_bc", s.mc.params.omega_bc);
            read_if(m, "ac", s.mc.ac);
            read_if(m, "precompute_cache", s.mc.precompute_cache);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("scenario parse error: ") + e.what());
    }
    s.nav.t_nav = s.nav_period_seconds();
    s.mc.params.eps_t = s.nav_period_seconds();
    return s;
}

inline Scenario load_scenario(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    Scenario s = parse_scenario(j);
    if (s.name.empty()) {
        const auto slash = path.find_last_of('/');
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        const auto dot = base.find_last_of('.');
        s.name = dot == std::string::npos ? base : base.substr(0, dot);
    }
    return s;
}

// ----------------------------------------------------------------------------
// validation
// ----------------------------------------------------------------------------

/// Check every modeling assumption; returns one message per violation, each
/// prefixed with the assumption's name. Empty means valid.
inline std::vector<std::string> validate_scenario(const Scenario &s) {
    std::vector<std::string> errors;
    auto fail = [&errors](const std::string &rule, const std::string &msg) {
        errors.push_back(rule + ": " + msg);
    };

    if (!(s.dt > 0.0)) fail("clock.dt", "global tick must be positive");
    if (s.max_ticks < 1) fail("clock.max_ticks", "must run at least one tick");
    if (s.period_plant < 1) fail("periods.divisibility", "plant period must be >= 1");
    if (s.period_nav < 1 || s.period_nav % s.period_plant != 0)
        fail("periods.divisibility", "navigation period must be a multiple of the plant period");
    if (s.period_mp < 1 || s.period_nav < 1 || s.period_mp % s.period_nav != 0)
        fail("periods.divisibility",
             "mission-planning period must be a multiple of the navigation period");

    try {
        s.plant.validate();
    } catch (const ValidationError &e) {
        fail("rover.parameters", e.what());
    }

    const double b0 = s.start_battery();
    if (!(b0 > 0.0) || b0 > s.plant.battery_capacity + 1e-12)
        fail("battery.initial", "initial battery must lie in (0, capacity]");

    if (!(s.nav.gains.arrival_radius > 0.0) ||
        s.nav.gains.arrival_radius >= s.plant.ps_detect_range)
        fail("nav.arrival_radius", "arrival radius must lie in (0, d_PS)");

    for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
        const Polygon &poly = s.obstacles[i].shape;
        const std::string tag = "obstacle[" + std::to_string(i) + "]";
        if (poly.vertices.size() < 3 || !poly.is_simple()) {
            fail("obstacle.assumption1", tag + " is not a simple polygon");
            continue;
        }
        if (poly.min_internal_angle() + 1e-12 < s.limits.min_internal_angle)
            fail("obstacle.assumption2",
                 tag + " internal angle below the configured lower bound");
        if (poly.min_edge_length() + 1e-12 < s.limits.min_edge_length)
            fail("obstacle.assumption3", tag + " edge length below the configured lower bound");
        for (std::size_t k = i + 1; k < s.obstacles.size(); ++k) {
            if (polygon_polygon_distance(poly, s.obstacles[k].shape) + 1e-12 <
                s.limits.min_separation)
                fail("obstacle.assumption4",
                     tag + " and obstacle[" + std::to_string(k) + "] are closer than the separation bound");
        }
        if (poly.contains(s.start.position) ||
            poly.distance_to(s.start.position) <= 0.0)
            fail("start.clear", "start position touches " + tag);
    }

    if (s.mode == ScenarioMode::EsCf) {
        try {
            s.energy.validate(s.plant, s.mp_period_seconds(), s.nav_period_seconds());
        } catch (const ValidationError &e) {
            fail("energy.bounds", e.what());
        }
        if (b0 <= s.energy.e_mp + s.energy.e_180)
            fail("battery.initial",
                 "initial battery must exceed E_MP + E_180 so energy safety holds at the start");
        bool at_station = false;
        for (const auto &st : s.stations)
            if (distance(s.start.position, st.location) <= s.plant.ps_detect_range)
                at_station = true;
        if (!at_station) fail("rover.assumption8", "rover must start at a power station");
        if (s.targets.empty()) fail("mission.targets", "at least one target is required");
    } else {
        if (!(s.mc.deadline > 0.0)) fail("mc.deadline", "deadline must be positive");
        if (!(s.mc.cell_size > 0.0)) fail("mc.cell_size", "cell size must be positive");
        if (s.mc.params.v_bc <= 0.0 || s.mc.params.v_bc > s.plant.v_max)
            fail("mc.bounds", "v_bc must lie in (0, v_max]");
        if (s.mc.params.omega_bc <= 0.0 || s.mc.params.omega_bc > s.plant.omega_max)
            fail("mc.bounds", "omega_bc must lie in (0, omega_max]");
        auto inside = [&](Vec2 p) {
            return p.x > s.mc.bounds_lower.x && p.x < s.mc.bounds_upper.x &&
                   p.y > s.mc.bounds_lower.y && p.y < s.mc.bounds_upper.y;
        };
        if (!inside(s.start.position)) fail("mc.bounds", "start position outside the map bounds");
        for (const auto &t : s.targets)
            if (!inside(t)) fail("mc.bounds", "target outside the map bounds");
        if (s.targets.empty()) fail("mission.targets", "at least one target is required");
    }
    return errors;
}

/// Validate or throw; the message carries every violated assumption.
inline void require_valid(const Scenario &s) {
    const auto errors = validate_scenario(s);
    if (errors.empty()) return;
    std::ostringstream os;
    os << "scenario '" << s.name << "' is invalid:";
    for (const auto &e : errors) os << "\n  " << e;
    throw ValidationError(os.str());
}

} // namespace cbsa
