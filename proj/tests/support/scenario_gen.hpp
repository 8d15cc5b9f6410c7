#pragma once

// Seeded generator of valid random scenarios for the property suites.
// Worlds are convex polygon fields satisfying the documented obstacle
// assumptions with margin, so every generated scenario passes validation by
// construction (asserted by the caller).

#include <cmath>
#include <random>
#include <vector>

#include "cbsa/planner.hpp"
#include "cbsa/scenario.hpp"
#include "cbsa/system.hpp"

namespace scenario_gen {

using namespace cbsa;

struct GenLimits {
    double world_half = 1.8;        ///< obstacle centers stay inside this box
    double obstacle_standoff = 0.5; ///< min distance from start pose
    double target_standoff = 0.4;   ///< min distance from targets
    double station_standoff = 0.3;  ///< min distance from stations
    double separation = 0.25;       ///< pairwise obstacle separation
};

inline Polygon regular_polygon(Vec2 center, double radius, int sides, double rotation) {
    Polygon p;
    for (int i = 0; i < sides; ++i) {
        const double a = rotation + 2.0 * M_PI * i / sides;
        p.vertices.push_back(center + radius * unit_from_angle(a));
    }
    return p;
}

inline double min_distance_to(const std::vector<Obstacle> &obs, Vec2 p) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto &o : obs) d = std::min(d, o.shape.distance_to(p));
    return d;
}

/// Random energy-safety / collision-freedom scenario. Obstacles are convex
/// regular polygons, wide enough that anything inside the stopping envelope
/// subtends more than one sensor gap.
inline Scenario random_es_scenario(std::uint64_t seed) {
    std::mt19937 rng(static_cast<unsigned>(seed * 2654435761u + 17));
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto pick = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    const GenLimits lim;

    Scenario sc;
    sc.name = "random_es_" + std::to_string(seed);
    sc.mode = ScenarioMode::EsCf;
    sc.seed = seed;
    sc.dt = 0.05;
    sc.period_plant = 1;
    sc.period_nav = 2 * pick(1, 1);  // 2; the mission-planning ratio varies
    sc.period_mp = sc.period_nav * pick(2, 3);
    sc.max_ticks = 6000;

    sc.plant = PlantParams{};
    sc.plant.battery_capacity = uni(30.0, 100.0);
    sc.start.battery = sc.plant.battery_capacity;

    // sound energy constants derived from the worst case, with headroom
    sc.energy.e_mp = derived_period_energy(sc.plant, sc.mp_period_seconds()) * 1.02;
    sc.energy.be_mp = sc.energy.e_mp;
    sc.energy.e_180 = derived_turn_energy(sc.plant, sc.nav_period_seconds()) * 1.02;
    sc.energy.eps_be = 0.0;
    sc.nav.t_nav = sc.nav_period_seconds();

    sc.start.position = {uni(-1.2, 1.2), uni(-1.2, 1.2)};
    sc.start.heading = uni(-M_PI, M_PI);
    sc.stations.push_back({sc.start.position});
    const int extra_stations = pick(0, 2);
    const int n_targets = pick(1, 3);
    for (int i = 0; i < n_targets; ++i) sc.targets.push_back({uni(-1.5, 1.5), uni(-1.5, 1.5)});

    // obstacles: rejection-sample convex polygons keeping all standoffs
    const int want = pick(2, 6);
    for (int attempt = 0; attempt < 200 && static_cast<int>(sc.obstacles.size()) < want;
         ++attempt) {
        const double radius = uni(0.16, 0.30);
        const Vec2 c{uni(-lim.world_half, lim.world_half), uni(-lim.world_half, lim.world_half)};
        Obstacle ob{regular_polygon(c, radius, pick(3, 7), uni(0.0, 2.0 * M_PI))};
        bool ok = ob.shape.distance_to(sc.start.position) >= lim.obstacle_standoff;
        for (const auto &t : sc.targets) ok = ok && ob.shape.distance_to(t) >= lim.target_standoff;
        for (const auto &other : sc.obstacles)
            ok = ok && polygon_polygon_distance(ob.shape, other.shape) >= lim.separation;
        if (ok) sc.obstacles.push_back(std::move(ob));
    }
    for (int i = 0; i < extra_stations; ++i) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            const Vec2 c{uni(-1.5, 1.5), uni(-1.5, 1.5)};
            if (min_distance_to(sc.obstacles, c) >= lim.station_standoff) {
                sc.stations.push_back({c});
                break;
            }
        }
    }
    return sc;
}

/// Random mission-completion scenario over a rasterized map. `tight` shrinks
/// the deadline to just above the certified bound and uses the wandering
/// advanced planner so the decision module has to intervene.
inline Scenario random_mc_scenario(std::uint64_t seed, bool tight) {
    std::mt19937 rng(static_cast<unsigned>(seed * 0x9e3779b9u + 3));
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto pick = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    Scenario sc;
    sc.name = std::string(tight ? "random_mc_tight_" : "random_mc_") + std::to_string(seed);
    sc.mode = ScenarioMode::Mc;
    sc.seed = seed;
    sc.dt = 0.05;
    sc.period_plant = 1;
    sc.period_nav = 2;
    sc.period_mp = 4;
    sc.max_ticks = 8000;
    sc.plant = PlantParams{};
    sc.plant.battery_capacity = 1e6;  // battery is out of scope for this property
    sc.start.battery = 1e6;
    sc.nav.t_nav = sc.nav_period_seconds();

    sc.mc.cell_size = 0.05;
    sc.mc.bounds_lower = {-2.0, -2.0};
    sc.mc.bounds_upper = {2.0, 2.0};
    sc.mc.params.v_bc = 0.4;
    sc.mc.params.omega_bc = M_PI;
    sc.mc.params.eps_t = sc.nav_period_seconds();
    sc.mc.ac = tight ? "detour" : (pick(0, 1) ? "detour" : "direct");
    sc.mc.precompute_cache = true;

    const GenLimits lim;
    sc.start.position = {uni(-1.5, 1.5), uni(-1.5, 1.5)};
    sc.start.heading = uni(-M_PI, M_PI);
    const int n_targets = pick(2, 3);
    for (int i = 0; i < n_targets; ++i) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            const Vec2 t{uni(-1.5, 1.5), uni(-1.5, 1.5)};
            if (distance(t, sc.start.position) > 0.3) {
                sc.targets.push_back(t);
                break;
            }
        }
    }
    const int want = pick(1, 4);
    for (int attempt = 0; attempt < 200 && static_cast<int>(sc.obstacles.size()) < want;
         ++attempt) {
        const double radius = uni(0.16, 0.3);
        const Vec2 c{uni(-1.4, 1.4), uni(-1.4, 1.4)};
        Obstacle ob{regular_polygon(c, radius, pick(3, 6), uni(0.0, 2.0 * M_PI))};
        bool ok = ob.shape.distance_to(sc.start.position) >= lim.obstacle_standoff;
        for (const auto &t : sc.targets) ok = ok && ob.shape.distance_to(t) >= lim.target_standoff;
        for (const auto &other : sc.obstacles)
            ok = ok && polygon_polygon_distance(ob.shape, other.shape) >= lim.separation;
        if (ok) sc.obstacles.push_back(std::move(ob));
    }

    // size the deadline from the certified bound over the initial reachable set
    GridMap map = GridMap::rasterize(sc.mc.bounds_lower, sc.mc.bounds_upper, sc.mc.cell_size,
                                     sc.world().polygons(),
                                     sc.nav.cf_margin + sc.mc.cell_size);
    const double reach = sc.plant.v_max * sc.mp_period_seconds();
    double worst = 0.0;
    for (const Cell c : reachable_region(map, sc.start.position, reach))
        worst = std::max(worst, mission_time_bound(map, map.cell_center(c), sc.targets,
                                                   sc.mc.params));
    sc.mc.deadline = tight ? worst + 3.0 * sc.mp_period_seconds()
                           : worst * 1.5 + 5.0;
    return sc;
}

} // namespace scenario_gen
