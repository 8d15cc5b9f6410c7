#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbsa/compose.hpp"
#include "cbsa/contract.hpp"
#include "cbsa/discharge.hpp"
#include "cbsa/exec.hpp"
#include "cbsa/mission_es.hpp"
#include "cbsa/navigation.hpp"
#include "cbsa/planner.hpp"
#include "cbsa/plant.hpp"
#include "cbsa/scenario.hpp"
#include "cbsa/simplex.hpp"

namespace cbsa {

// ============================================================================
// System assembly: build the three-component rover system with its Simplex
// instances, coordinated-switch wiring and contracts, then discharge-check
// the wiring before anything runs.
// ============================================================================

/// Values shared between the components' store variables and the runtime
/// monitors that need derived quantities (the backtrack-energy estimate is
/// maintained once per tick by the harness and consumed by the contract
/// predicates).
struct MonitorContext {
    double be_est = 0.0;  ///< energy to retrace the current waypoint log
};

struct AssembleOptions {
    /// Mutation hooks for discharge-checker tests: drop a guarantee token.
    bool drop_nav_backtrack_guarantee = false;
    bool drop_plant_env_guarantee = false;
    /// Falsification hook: accept energy constants below the derived worst
    /// case so runs can demonstrate why the switching margin is necessary.
    bool allow_unsound_energy = false;
};

struct AssembledSystem {
    Composition composition;
    ValueStore initial_store;
    std::vector<Contract> contracts;
    DischargeGraph discharge;
    DischargeReport discharge_report;
    std::shared_ptr<MonitorContext> monitor_ctx;
    std::shared_ptr<GridMap> map;           ///< mission-completion mode only
    std::shared_ptr<BoundCache> bound_cache;
};

namespace detail {

inline double bool_val(bool b) { return b ? 1.0 : 0.0; }

// ---------------------------------------------------------------------------
// energy-safety components
// ---------------------------------------------------------------------------

inline Component make_mission_planning_es(const Scenario &sc) {
    const double dt = sc.dt;
    const std::int64_t s_mp = sc.period_mp;
    const EnergyConstants energy = sc.energy;
    const double arrival = sc.nav.gains.arrival_radius;
    const std::vector<Vec2> targets = sc.targets;

    // Forward-energy accounting at plant granularity. The accumulator mirrors
    // the waypoint log exactly: when the recorder re-anchored last tick (seen
    // through the delayed W input), FE restarts from that tick's consumption,
    // so FE always equals the energy spent along the retained log.
    RateEntry fast;
    fast.period = 1;
    fast.next_state = [](const StoreView &view, std::int64_t tick) -> Assignments {
        const bool ac = ctlr_from(view.scalar("ctlr")) == Ctlr::AC;
        const double de = view.scalar("dE");
        const auto &log = view.poses("W");
        const bool re_anchored = !log.empty() && log.front().tick == tick - 1;
        MissionState ms;
        ms.forward_energy = re_anchored ? 0.0 : view.scalar("FE");
        if (ac) ms = forward_energy_accumulate(ms, de);
        return {{"FE", ms.forward_energy}};
    };

    RateEntry slow;
    slow.period = s_mp;
    slow.next_state = [dt, s_mp, energy, arrival, targets](const StoreView &view,
                                                           std::int64_t tick) -> Assignments {
        MissionState ms;
        ms.targets = targets;
        ms.next_index = static_cast<std::size_t>(view.scalar("next_index"));
        ms.target = view.vec2("T");
        ms.mission_done = view.scalar("mission_done") != 0.0;
        ms.forward_energy = view.scalar("FE");
        ms.last_station = view.vec2("PS");

        SimplexInstance inst;
        inst.name = "mission-planning";
        inst.decision_period = s_mp;
        inst.switch_to_bc = Pred::of("battery_threshold", [energy](const StoreView &v, const SimClock &) {
            return mp_dm_switch(v.scalar("B"), v.scalar("FE"), energy);
        });
        inst.reenable_ac = !inst.switch_to_bc;  // leave recharge mode only once the threshold clears
        inst.switch_out = "ctlr";
        inst.active = ctlr_from(view.scalar("ctlr"));
        const Ctlr decision = dm_decide(inst, view, SimClock{dt, tick});
        ms.ctlr = decision;

        if (decision == Ctlr::BC) {
            ms = recharge_controller(ms);
        } else {
            ms = choose_next_target(ms, view.vec2("p"), arrival);
        }
        return {{"T", ms.target},
                {"ctlr", ctlr_value(decision)},
                {"next_index", static_cast<double>(ms.next_index)},
                {"mission_done", bool_val(ms.mission_done)}};
    };

    return Component("mission-planning",
                     {"T", "ctlr", "next_index", "FE", "mission_done"},
                     {"p", "B", "PS", "W", "dE"},
                     {"T", "ctlr"},
                     {fast, slow});
}

inline Component make_navigation_es(const Scenario &sc) {
    const PlantParams plant = sc.plant;
    NavConfig cfg = sc.nav;
    cfg.t_nav = sc.nav_period_seconds();

    RateEntry entry;
    entry.period = sc.period_nav;
    entry.next_state = [plant, cfg](const StoreView &view, std::int64_t tick) -> Assignments {
        RoverState s;
        s.position = view.vec2("p");
        s.heading = view.scalar("theta");
        s.v = view.scalar("v");
        s.omega = view.scalar("omega");

        NavState ns;
        ns.mode = static_cast<NavMode>(static_cast<int>(view.scalar("nav_mode")));
        ns.turn_remaining = view.scalar("turn_rem");
        ns.log = view.poses("W");

        const bool visit = view.scalar("ps_visit") != 0.0;
        NavDecision d = nav_tick(s, view.vec2("T"), ctlr_from(view.scalar("ctlr")),
                                 view.seq("ir"), visit, visit, std::move(ns), tick, plant, cfg);
        const double diag = view.scalar("bt_diag");
        return {{"v_T", d.command.v},
                {"omega_T", d.command.omega},
                {"W", d.state.log},
                {"nav_mode", static_cast<double>(static_cast<int>(d.state.mode))},
                {"turn_rem", d.state.turn_remaining},
                {"bt_diag", bool_val(diag != 0.0 || d.backtrack_empty_far)}};
    };

    return Component("navigation",
                     {"v_T", "omega_T", "W", "nav_mode", "turn_rem", "bt_diag"},
                     {"T", "ctlr", "p", "theta", "v", "omega", "ir", "ps_visit"},
                     {"v_T", "omega_T", "W"},
                     {entry});
}

inline Component make_plant(const Scenario &sc, bool allow_recharge) {
    const PlantParams plant = sc.plant;
    const World world = sc.world();
    const double t_step = sc.dt * static_cast<double>(sc.period_plant);

    RateEntry entry;
    entry.period = sc.period_plant;
    entry.next_state = [plant, world, t_step, allow_recharge](const StoreView &view,
                                                              std::int64_t) -> Assignments {
        RoverState s;
        s.position = view.vec2("p");
        s.heading = view.scalar("theta");
        s.v = view.scalar("v");
        s.omega = view.scalar("omega");
        s.battery = view.scalar("B");

        const double v_t = view.scalar("v_T");
        const double omega_t = view.scalar("omega_T");
        // docking: recharge requires recharge mode and a commanded stop, so a
        // moving drive-past of a station never recharges mid-retrace
        const bool recharge_mode = allow_recharge &&
                                   ctlr_from(view.scalar("ctlr")) == Ctlr::BC &&
                                   std::abs(v_t) < 1e-12 && std::abs(omega_t) < 1e-12;
        const PlantStepResult res = plant_step(s, v_t, omega_t, plant, world, t_step, recharge_mode);
        const SensorReading reading = sense(res.state, world, plant);

        Vec2 last_ps = view.vec2("PS");
        if (res.visited_station) last_ps = world.stations[*res.visited_station].location;

        return {{"p", res.state.position},
                {"theta", res.state.heading},
                {"v", res.state.v},
                {"omega", res.state.omega},
                {"B", res.state.battery},
                {"ir", reading.ir},
                {"PS", last_ps},
                {"d_o", reading.d_o},
                {"dE", res.consumed},
                {"ps_visit", bool_val(res.visited_station.has_value())},
                {"recharged", bool_val(res.recharged)}};
    };

    return Component("plant",
                     {"p", "theta", "v", "omega", "B", "ir", "PS", "d_o", "dE", "ps_visit",
                      "recharged"},
                     {"v_T", "omega_T", "ctlr"},
                     {"p", "theta", "v", "omega", "B", "ir", "PS", "d_o", "dE", "ps_visit",
                      "recharged"},
                     {entry});
}

// ---------------------------------------------------------------------------
// mission-completion components
// ---------------------------------------------------------------------------

/// Deterministic detour point for the stand-in advanced planner: a free cell
/// center picked by hashing (seed, leg index) near the leg midpoint.
inline std::optional<Vec2> pick_detour(const GridMap &map, Vec2 from, Vec2 to,
                                       std::uint64_t seed, std::size_t leg) {
    std::uint64_t h = seed * 0x9e3779b97f4a7c15ull + leg * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull;
    auto next = [&h]() {
        h ^= h >> 27;
        h *= 0x2545f4914f6cdd1dull;
        h ^= h >> 31;
        return h;
    };
    const Vec2 mid = 0.5 * (from + to);
    for (int attempt = 0; attempt < 24; ++attempt) {
        const double ang = 2.0 * M_PI * (next() % 10000) / 10000.0;
        const double rad = 0.25 + 0.45 * ((next() % 10000) / 10000.0);
        const Vec2 cand = mid + rad * unit_from_angle(ang);
        const Cell c = map.cell_of(cand);
        if (map.free(c)) return map.cell_center(c);
    }
    return std::nullopt;
}

inline Component make_mission_planning_mc(const Scenario &sc, std::shared_ptr<GridMap> map,
                                          std::shared_ptr<BoundCache> cache) {
    const double dt = sc.dt;
    const std::int64_t s_mp = sc.period_mp;
    const double arrival = sc.nav.gains.arrival_radius;
    const std::vector<Vec2> targets = sc.targets;
    const McConfig mc = sc.mc;
    const double reach_radius = sc.plant.v_max * sc.mp_period_seconds();
    const bool detour_ac = sc.mc.ac == "detour";
    const std::uint64_t seed = sc.seed;
    if (!sc.mc.precompute_cache) cache = nullptr;

    RateEntry entry;
    entry.period = s_mp;
    entry.next_state = [=](const StoreView &view, std::int64_t tick) -> Assignments {
        std::size_t index = static_cast<std::size_t>(view.scalar("next_index"));
        bool done = view.scalar("mission_done") != 0.0;
        bool detour_active = view.scalar("detour_active") != 0.0;
        Vec2 detour = view.vec2("detour");
        Ctlr ctlr = ctlr_from(view.scalar("ctlr"));
        const Vec2 p = view.vec2("p");

        // arrival bookkeeping: clear a reached detour, advance a reached target
        if (!done) {
            if (detour_active && distance(p, detour) <= arrival) {
                detour_active = false;
            } else if (index < targets.size() && distance(p, targets[index]) <= arrival) {
                ++index;
                detour_active = false;
                if (index >= targets.size()) done = true;
            }
        }

        std::vector<Vec2> remaining(targets.begin() + static_cast<std::ptrdiff_t>(
                                                          std::min(index, targets.size())),
                                    targets.end());

        if (ctlr == Ctlr::AC && !done) {
            const double remaining_time = mc.deadline - dt * static_cast<double>(tick);
            if (mc_dm_switch(*map, p, remaining, remaining_time, dt * static_cast<double>(s_mp),
                             reach_radius, mc.params, cache.get()))
                ctlr = Ctlr::BC;  // sticky: the baseline finishes the mission
        }

        Vec2 t_out = view.vec2("T");
        if (!done && index < targets.size()) {
            if (ctlr == Ctlr::BC) {
                t_out = targets[index];
                detour_active = false;
            } else if (detour_ac) {
                if (!detour_active) {
                    if (auto d = pick_detour(*map, p, targets[index], seed, index)) {
                        detour = *d;
                        detour_active = true;
                    }
                }
                t_out = detour_active ? detour : targets[index];
            } else {
                t_out = targets[index];
            }
        }

        return {{"T", t_out},
                {"ctlr", ctlr_value(ctlr)},
                {"next_index", static_cast<double>(index)},
                {"mission_done", bool_val(done)},
                {"detour_active", bool_val(detour_active)},
                {"detour", detour}};
    };

    return Component("mission-planning",
                     {"T", "ctlr", "next_index", "mission_done", "detour_active", "detour"},
                     {"p"},
                     {"T", "ctlr"},
                     {entry});
}

// plan encoding in a scalar sequence: [seg_index, seg_remaining, k0, v0, k1, v1, ...]
inline std::vector<double> encode_plan(const PrimitivePlan &plan) {
    std::vector<double> out{0.0, plan.segments.empty() ? 0.0 : plan.segments.front().value};
    for (const auto &seg : plan.segments) {
        out.push_back(seg.kind == PrimitiveSegment::Kind::Turn ? 0.0 : 1.0);
        out.push_back(seg.value);
    }
    return out;
}

inline Component make_navigation_mc(const Scenario &sc, std::shared_ptr<GridMap> map) {
    const PlantParams plant = sc.plant;
    NavConfig cfg = sc.nav;
    cfg.t_nav = sc.nav_period_seconds();
    const McParams mc = sc.mc.params;
    const double t_nav = cfg.t_nav;

    RateEntry entry;
    entry.period = sc.period_nav;
    entry.next_state = [=](const StoreView &view, std::int64_t) -> Assignments {
        RoverState s;
        s.position = view.vec2("p");
        s.heading = view.scalar("theta");
        const Vec2 target = view.vec2("T");
        const Ctlr ctlr = ctlr_from(view.scalar("ctlr"));

        double plan_id = view.scalar("mc_plan_id");
        double running = view.scalar("mc_plan_running");
        double plan_tu = view.scalar("mc_plan_tu");
        double plan_periods = view.scalar("mc_plan_periods");
        std::vector<double> plan = view.seq("mc_plan");
        Vec2 plan_goal = view.vec2("mc_plan_goal");
        NavCommand cmd{0.0, 0.0};
        double mode;

        if (ctlr == Ctlr::AC) {
            running = 0.0;
            plan.clear();
            if (cf_dm(view.seq("ir"), plant, t_nav, cfg.cf_margin) == Ctlr::BC) {
                mode = static_cast<double>(static_cast<int>(NavMode::CfStop));
                cmd = avoid_obstacles(s);
            } else {
                mode = static_cast<double>(static_cast<int>(NavMode::GoToTarget));
                cmd = go_to_target(s, target, plant, cfg.gains);
            }
        } else {
            mode = 5.0;  // baseline primitive executor
            const bool need_plan = distance(plan_goal, target) > 1e-12;
            if (need_plan) {
                const PrimitivePlan p = plan_route(*map, s.position, s.heading, target, mc);
                plan = encode_plan(p);
                plan_goal = target;
                plan_id += 1.0;
                plan_tu = time_upper_bound(*map, s.position, target, mc);
                plan_periods = 0.0;
                running = plan.size() > 2 ? 1.0 : 0.0;  // empty plan: already there
            }
            if (running != 0.0) {
                plan_periods += 1.0;  // one command period issued below
                auto seg_kind = [&plan](std::size_t i) { return plan[2 + 2 * i]; };
                const std::size_t nsegs = (plan.size() - 2) / 2;
                std::size_t idx = static_cast<std::size_t>(plan[0]);
                double remaining = plan[1];
                if (seg_kind(idx) == 0.0) {  // turn (signed angle)
                    const double chunk =
                        std::clamp(remaining, -mc.omega_bc * t_nav, mc.omega_bc * t_nav);
                    cmd = {0.0, chunk / t_nav};
                    remaining -= chunk;
                } else {  // straight
                    const double chunk = std::min(remaining, mc.v_bc * t_nav);
                    cmd = {chunk / t_nav, 0.0};
                    remaining -= chunk;
                }
                if (std::abs(remaining) < 1e-12) {
                    ++idx;
                    if (idx >= nsegs) {
                        running = 0.0;  // plan completes at the end of this period
                        plan[0] = static_cast<double>(nsegs);
                        plan[1] = 0.0;
                    } else {
                        plan[0] = static_cast<double>(idx);
                        plan[1] = plan[2 + 2 * idx + 1];
                    }
                } else {
                    plan[1] = remaining;
                }
            }
        }

        return {{"v_T", cmd.v},
                {"omega_T", cmd.omega},
                {"nav_mode", mode},
                {"mc_plan", plan},
                {"mc_plan_goal", plan_goal},
                {"mc_plan_id", plan_id},
                {"mc_plan_tu", plan_tu},
                {"mc_plan_periods", plan_periods},
                {"mc_plan_running", running}};
    };

    return Component("navigation",
                     {"v_T", "omega_T", "nav_mode", "mc_plan", "mc_plan_goal", "mc_plan_id",
                      "mc_plan_tu", "mc_plan_periods", "mc_plan_running"},
                     {"T", "ctlr", "p", "theta", "v", "omega", "ir"},
                     {"v_T", "omega_T"},
                     {entry});
}

// ---------------------------------------------------------------------------
// contracts
// ---------------------------------------------------------------------------

inline Pred pred_plant_env(const PlantParams &plant) {
    return Pred::of("A_P", [plant](const StoreView &v, const SimClock &) {
        const double vel = v.scalar("v");
        const double om = v.scalar("omega");
        const double b = v.scalar("B");
        return vel >= -1e-9 && vel <= plant.v_max + 1e-9 && std::abs(om) <= plant.omega_max + 1e-9 &&
               b <= plant.battery_capacity + 1e-9;
    });
}

inline Pred pred_ctlr_bc() {
    return Pred::of("ctlr=BC", [](const StoreView &v, const SimClock &) {
        return ctlr_from(v.scalar("ctlr")) == Ctlr::BC;
    });
}

inline std::vector<Contract> make_contracts_es(const Scenario &sc,
                                               std::shared_ptr<MonitorContext> ctx,
                                               const AssembleOptions &opts) {
    const EnergyConstants k = sc.energy;

    Pred be_within_budget = Pred::of("BE<=(1+eps)FE", [ctx, k](const StoreView &v, const SimClock &) {
        return ctx->be_est <= backtrack_energy_bound(v.scalar("FE"), k.eps_be) + 1e-9;
    });
    Pred es = Pred::of("ES", [ctx, k](const StoreView &v, const SimClock &) {
        const double need =
            es_energy_requirement(ctlr_from(v.scalar("ctlr")), ctx->be_est, k.e_180);
        return v.scalar("B") > need;
    });
    Pred cf = Pred::of("CF", [](const StoreView &v, const SimClock &) {
        return v.scalar("d_o") > 0.0;
    });

    Contract mp;
    mp.component = "mission-planning";
    mp.inputs = {"p", "PS", "B", "W"};
    mp.outputs = {"T", "ctlr"};
    mp.assumption = implies(pred_ctlr_bc(), be_within_budget);
    mp.guarantee = es;
    mp.assumption_tokens = {"A_BE"};
    mp.guarantee_tokens = {"ES"};

    Contract nav;
    nav.component = "navigation";
    nav.inputs = {"T", "ctlr", "p", "ir", "v", "omega"};
    nav.outputs = {"v_T", "omega_T", "W"};
    nav.assumption = pred_plant_env(sc.plant);
    nav.guarantee = cf && implies(pred_ctlr_bc(), be_within_budget);
    nav.assumption_tokens = {"A_P"};
    nav.guarantee_tokens = {"CF", "A_BE"};
    if (opts.drop_nav_backtrack_guarantee) nav.guarantee_tokens = {"CF"};

    Contract plant;
    plant.component = "plant";
    plant.inputs = {"v_T", "omega_T"};
    plant.outputs = {"p", "PS", "B", "ir", "v", "omega"};
    plant.assumption = Pred::always_true();
    plant.guarantee = pred_plant_env(sc.plant);
    plant.assumption_tokens = {"true"};
    plant.guarantee_tokens = {"A_P"};
    if (opts.drop_plant_env_guarantee) plant.guarantee_tokens = {};

    return {mp, nav, plant};
}

inline std::vector<Contract> make_contracts_mc(const Scenario &sc, const AssembleOptions &opts) {
    Pred deadline_ok = Pred::of("MC", [sc](const StoreView &v, const SimClock &c) {
        if (v.scalar("mission_done") != 0.0) return true;
        return c.time() < sc.mc.deadline;
    });

    Contract mp;
    mp.component = "mission-planning";
    mp.inputs = {"p"};
    mp.outputs = {"T", "ctlr"};
    mp.assumption = implies(pred_ctlr_bc(), Pred::always_true());  // leg bounds checked by monitor
    mp.guarantee = deadline_ok;
    mp.assumption_tokens = {"A_TU"};
    mp.guarantee_tokens = {"MC"};

    Contract nav;
    nav.component = "navigation";
    nav.inputs = {"T", "ctlr", "p", "ir", "v", "omega"};
    nav.outputs = {"v_T", "omega_T"};
    nav.assumption = pred_plant_env(sc.plant);
    nav.guarantee = Pred::always_true();  // measured-vs-bound is enforced per completed leg
    nav.assumption_tokens = {"A_P"};
    nav.guarantee_tokens = {"A_TU"};
    if (opts.drop_nav_backtrack_guarantee) nav.guarantee_tokens = {};

    Contract plant;
    plant.component = "plant";
    plant.inputs = {"v_T", "omega_T"};
    plant.outputs = {"p", "PS", "B", "ir", "v", "omega"};
    plant.assumption = Pred::always_true();
    plant.guarantee = pred_plant_env(sc.plant);
    plant.assumption_tokens = {"true"};
    plant.guarantee_tokens = {"A_P"};
    if (opts.drop_plant_env_guarantee) plant.guarantee_tokens = {};

    return {mp, nav, plant};
}

} // namespace detail

/// Build the composed system for a validated scenario, wire the contracts and
/// run the static discharge check. Throws DischargeError when an assumption
/// is left uncovered.
inline AssembledSystem assemble(const Scenario &sc, const AssembleOptions &opts = {}) {
    if (opts.allow_unsound_energy) {
        std::vector<std::string> rest;
        for (const auto &e : validate_scenario(sc))
            if (e.rfind("energy.bounds", 0) != 0) rest.push_back(e);
        if (!rest.empty()) throw ValidationError("scenario '" + sc.name + "': " + rest.front());
    } else {
        require_valid(sc);
    }

    AssembledSystem sys;
    sys.monitor_ctx = std::make_shared<MonitorContext>();

    if (sc.mode == ScenarioMode::Mc) {
        sys.map = std::make_shared<GridMap>(GridMap::rasterize(
            sc.mc.bounds_lower, sc.mc.bounds_upper, sc.mc.cell_size, sc.world().polygons(),
            sc.nav.cf_margin + sc.mc.cell_size));
        sys.bound_cache = std::make_shared<BoundCache>();
        sys.composition = compose(compose(detail::make_mission_planning_mc(sc, sys.map, sys.bound_cache),
                                          detail::make_navigation_mc(sc, sys.map)),
                                  detail::make_plant(sc, false));
        sys.contracts = detail::make_contracts_mc(sc, opts);
    } else {
        sys.composition = compose(
            compose(detail::make_mission_planning_es(sc), detail::make_navigation_es(sc)),
            detail::make_plant(sc, true));
        sys.contracts = detail::make_contracts_es(sc, sys.monitor_ctx, opts);
    }

    for (const Contract &c : sys.contracts) sys.discharge.add_contract(c);
    // the backtrack-budget guarantee reaches mission planning over the
    // feedback-delayed waypoint log
    sys.discharge.mark_delayed("navigation", "mission-planning");
    sys.discharge_report = check_discharge(sys.discharge);
    if (!sys.discharge_report.passed)
        throw DischargeError(sys.discharge_report.summary());

    // initial store
    ValueStore &st = sys.initial_store;
    const World world = sc.world();
    RoverState s0;
    s0.position = sc.start.position;
    s0.heading = sc.start.heading;
    s0.battery = sc.start_battery();
    const SensorReading r0 = sense(s0, world, sc.plant);

    st.set("p", s0.position);
    st.set("theta", s0.heading);
    st.set("v", 0.0);
    st.set("omega", 0.0);
    st.set("B", s0.battery);
    st.set("ir", r0.ir);
    Vec2 ps0 = s0.position;
    if (r0.detected_station) ps0 = world.stations[*r0.detected_station].location;
    st.set("PS", ps0);
    st.set("d_o", r0.d_o);
    st.set("dE", 0.0);
    st.set("ps_visit", detail::bool_val(r0.detected_station.has_value()));
    st.set("recharged", 0.0);
    st.set("T", sc.targets.empty() ? s0.position : sc.targets.front());
    st.set("ctlr", ctlr_value(Ctlr::AC));
    st.set("next_index", 0.0);
    st.set("mission_done", 0.0);
    st.set("v_T", 0.0);
    st.set("omega_T", 0.0);

    if (sc.mode == ScenarioMode::Mc) {
        st.set("detour_active", 0.0);
        st.set("detour", s0.position);
        st.set("nav_mode", 0.0);
        st.set("mc_plan", std::vector<double>{});
        st.set("mc_plan_goal", s0.position);
        st.set("mc_plan_id", 0.0);
        st.set("mc_plan_tu", 0.0);
        st.set("mc_plan_periods", 0.0);
        st.set("mc_plan_running", 0.0);
    } else {
        st.set("FE", 0.0);
        st.set("W", WaypointLog{{s0.position, s0.heading, 0}});
        st.set("nav_mode", 0.0);
        st.set("turn_rem", 0.0);
        st.set("bt_diag", 0.0);
    }
    return sys;
}

} // namespace cbsa
