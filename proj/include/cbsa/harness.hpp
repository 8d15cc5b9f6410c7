#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cbsa/system.hpp"

namespace cbsa {

// ============================================================================
// Scenario runner: per-tick trace records, online property checkers for the
// three system properties, the per-decision inductive case checks, and the
// measured backtrack-energy bookkeeping.
// ============================================================================

struct TraceRecord {
    std::int64_t tick = 0;
    double time = 0.0;
    Vec2 position;
    double heading = 0.0;
    double v = 0.0;
    double omega = 0.0;
    double battery = 0.0;
    double min_ir = 0.0;
    double d_o = std::numeric_limits<double>::infinity();
    double fe = 0.0;
    double be_est = 0.0;
    double e_req = 0.0;
    double de = 0.0;  ///< energy consumed this tick
    int mp_ctlr = 0;  ///< 0 = AC, 1 = BC
    int nav_mode = 0;
    std::int64_t next_index = 0;
    bool mission_done = false;
    bool ps_visit = false;
    bool recharged = false;
    bool es_ok = true;
    bool cf_ok = true;
    bool mc_ok = true;
};

struct Event {
    std::int64_t tick = 0;
    std::string type;
    std::string detail;
};

/// One recharge episode: switch, retrace, arrival.
struct BacktrackEpisode {
    std::int64_t switch_tick = 0;
    std::int64_t arrival_tick = 0;
    double fe_at_switch = 0.0;
    double measured_backtrack = 0.0;  ///< plant energy over the retrace periods
    double arrival_battery = 0.0;     ///< battery on reaching the anchor, before recharging
    double max_path_deviation = std::numeric_limits<double>::infinity();
    bool completed = false;
};

enum class StopCause { MaxTicks, MissionComplete, Violation };

struct RunResult {
    std::string scenario_name;
    std::vector<TraceRecord> records;
    std::vector<Event> events;
    std::vector<BacktrackEpisode> episodes;
    std::vector<std::string> failures;  ///< empty when every check held
    bool es_ok = true;
    bool cf_ok = true;
    bool mc_ok = true;
    bool cases_ok = true;
    bool monitors_ok = true;
    bool legs_ok = true;
    bool mission_completed = false;
    double completion_time = 0.0;
    std::int64_t ticks_run = 0;
    StopCause stop = StopCause::MaxTicks;
    std::optional<std::int64_t> violation_tick;

    bool properties_ok() const {
        return es_ok && cf_ok && mc_ok && cases_ok && monitors_ok && legs_ok;
    }
    /// CLI exit code: 0 all properties held, 2 property violation.
    int exit_code() const { return properties_ok() ? 0 : 2; }
};

struct HarnessOptions {
    bool fail_fast = true;       ///< abort the run at the first violation
    bool keep_records = true;    ///< retain the full per-tick trace
    bool check_cases = true;     ///< inductive per-decision case checks
};

namespace detail {

inline double min_of(const std::vector<double> &xs, double fallback) {
    double m = fallback;
    for (double x : xs) m = std::min(m, x);
    return m;
}

/// Per-decision inductive checks on consecutive mission-planning decisions,
/// mirroring the four controller-transition cases of the energy argument.
class CaseChecker {
  public:
    CaseChecker(const Scenario &sc) : sc_(sc) {}

    void on_record(const std::vector<TraceRecord> &recs, std::vector<std::string> &failures) {
        const std::int64_t s = sc_.period_mp;
        const TraceRecord &now = recs.back();
        if (now.tick % s != 0 || now.tick < s + 2) return;
        // decision pair (m, m'): pre-states are the records just before each
        // decision tick; the period between ran under the first decision
        const std::size_t i_pre0 = static_cast<std::size_t>(now.tick - s - 2);   // tick m-1
        const std::size_t i_dec0 = static_cast<std::size_t>(now.tick - s - 1);   // tick m
        const std::size_t i_pre1 = static_cast<std::size_t>(now.tick - 2);       // tick m'-1
        const std::size_t i_dec1 = static_cast<std::size_t>(now.tick - 1);       // tick m'
        if (recs[i_dec0].tick % s != 0) return;  // alignment guard

        const TraceRecord &pre0 = recs[i_pre0];
        const TraceRecord &dec0 = recs[i_dec0];
        const TraceRecord &pre1 = recs[i_pre1];
        const TraceRecord &dec1 = recs[i_dec1];

        double used = 0.0, bt_used = 0.0, turn_used = 0.0;
        bool recharged = false;
        for (std::size_t i = i_dec0; i <= i_pre1; ++i) {
            used += recs[i].de;
            recharged |= recs[i].recharged;
            if (recs[i].nav_mode == static_cast<int>(NavMode::Backtrack)) bt_used += recs[i].de;
            if (recs[i].nav_mode == static_cast<int>(NavMode::Turn)) turn_used += recs[i].de;
        }

        auto fail = [&](const std::string &what) {
            failures.push_back("case check at tick " + std::to_string(dec1.tick) + ": " + what);
        };
        const double tol = 1e-6;

        // worst-case one-period energy bound holds for any controller
        if (used > sc_.energy.e_mp + 1e-9)
            fail("period energy " + std::to_string(used) + " exceeds E_MP");
        if (turn_used > sc_.energy.e_180 + 1e-9)
            fail("turn energy exceeds E_180");

        if (!recharged) {
            if (std::abs((pre0.battery - used) - pre1.battery) > tol)
                fail("battery accounting mismatch");
            const bool bc_period = dec0.mp_ctlr == 1;
            if (bc_period) {
                // recharge mode: the retrace partition
                //   BE(p', PS, W') = BE(p, PS, W) - BE(p, p', W)
                if (std::abs(pre1.be_est - (pre0.be_est - bt_used)) > tol)
                    fail("backtrack-energy partition violated");
            } else {
                // forward mode: growth bounded by BE_MP
                if (pre1.be_est > pre0.be_est + sc_.energy.be_mp + tol)
                    fail("backtrack-energy growth exceeds BE_MP");
            }
            // post-decision energy-safety form of the invariant
            const double need = es_energy_requirement(
                dec1.mp_ctlr == 1 ? Ctlr::BC : Ctlr::AC, pre1.be_est, sc_.energy.e_180);
            if (!(pre1.battery > need - tol)) fail("energy requirement not met at decision");
        }
        // leaving recharge mode requires the switching condition to be false
        if (dec0.mp_ctlr == 1 && dec1.mp_ctlr == 0) {
            const double fe_dm = pre1.fe;  // frozen during recharge mode
            if (mp_dm_switch(pre1.battery, fe_dm, sc_.energy) && !recharged)
                fail("returned to the advanced controller while the switching condition held");
        }
    }

  private:
    Scenario sc_;
};

} // namespace detail

/// Run one scenario end to end with monitors, property checkers and trace
/// recording. The scenario is validated and discharge-checked by assemble().
inline RunResult run_scenario(const Scenario &sc, const HarnessOptions &opts = {},
                              const AssembleOptions &aopts = {}) {
    AssembledSystem sys = assemble(sc, aopts);
    RunResult result;
    result.scenario_name = sc.name;

    const bool es_mode = sc.mode == ScenarioMode::EsCf;
    const double t_nav = sc.nav_period_seconds();

    std::vector<ContractMonitor> monitors;
    for (const Contract &c : sys.contracts) {
        std::int64_t period = sc.period_nav;
        if (c.component == "mission-planning") period = sc.period_mp;
        if (c.component == "plant") period = sc.period_plant;
        monitors.emplace_back(c, period);
    }
    {
        SimClock clock0{sc.dt, 0};
        const StoreView init_view(sys.initial_store);
        sys.monitor_ctx->be_est = 0.0;
        for (auto &m : monitors) m.prime(init_view, clock0);
    }

    BacktrackEnergyTracker be_tracker;
    detail::CaseChecker case_checker(sc);
    double last_forward_heading = sc.start.heading;

    // forward path since the last anchor and the in-progress retrace, used
    // for the backtrack-equals-forward measurements
    std::vector<Vec2> forward_path{sc.start.position};
    std::int64_t forward_anchor_tick = 0;
    std::vector<Vec2> back_path;
    std::optional<BacktrackEpisode> episode;
    bool bt_diag_seen = false;

    auto close_episode = [&](std::int64_t tick) {
        if (!episode) return;
        episode->arrival_tick = tick;
        episode->completed = true;
        episode->arrival_battery =
            result.records.empty() ? 0.0 : result.records.back().battery;
        // the retrace visits the forward samples in reverse order
        double dev = 0.0;
        if (back_path.size() + 1 != forward_path.size()) {
            dev = std::numeric_limits<double>::infinity();
        } else {
            for (std::size_t k = 0; k < back_path.size(); ++k) {
                const std::size_t j = forward_path.size() - 2 - k;
                dev = std::max(dev, distance(back_path[k], forward_path[j]));
            }
        }
        episode->max_path_deviation = dev;
        result.episodes.push_back(*episode);
        episode.reset();
        back_path.clear();
    };

    Observer harness_observer = [&](const StoreView &view, const SimClock &clock) {
        TraceRecord r;
        r.tick = clock.tick;
        r.time = clock.time();
        r.position = view.vec2("p");
        r.heading = view.scalar("theta");
        r.v = view.scalar("v");
        r.omega = view.scalar("omega");
        r.battery = view.scalar("B");
        r.min_ir = detail::min_of(view.seq("ir"), sc.plant.sensor_range);
        r.d_o = view.scalar("d_o");
        r.de = view.scalar("dE");
        r.mp_ctlr = ctlr_from(view.scalar("ctlr")) == Ctlr::BC ? 1 : 0;
        r.nav_mode = static_cast<int>(view.scalar("nav_mode"));
        r.next_index = static_cast<std::int64_t>(view.scalar("next_index"));
        r.mission_done = view.scalar("mission_done") != 0.0;
        r.ps_visit = view.scalar("ps_visit") != 0.0;
        r.recharged = view.scalar("recharged") != 0.0;

        if (es_mode) {
            r.fe = view.scalar("FE");
            const auto &log = view.poses("W");
            // the retrace estimate needs the forward-frame heading: frozen
            // while the rover executes the half turn, un-reversed during the
            // retrace itself
            double fwd_heading = r.heading;
            if (r.nav_mode == static_cast<int>(NavMode::Turn)) {
                fwd_heading = last_forward_heading;
            } else if (r.nav_mode == static_cast<int>(NavMode::Backtrack) ||
                       r.nav_mode == static_cast<int>(NavMode::Hold)) {
                fwd_heading = r.heading - M_PI;
            }
            last_forward_heading = fwd_heading;
            r.be_est = be_tracker.update(r.position, fwd_heading, log, sc.plant, t_nav);
            r.e_req = es_energy_requirement(r.mp_ctlr == 1 ? Ctlr::BC : Ctlr::AC, r.be_est,
                                            sc.energy.e_180);
            sys.monitor_ctx->be_est = r.be_est;
        }

        const TraceRecord *prev = result.records.empty() ? nullptr : &result.records.back();

        // -------- events --------
        auto event = [&](const std::string &type, const std::string &detail = "") {
            result.events.push_back({clock.tick, type, detail});
        };
        if (prev) {
            if (prev->mp_ctlr == 0 && r.mp_ctlr == 1) event("switch_bc", "mission-planning");
            if (prev->mp_ctlr == 1 && r.mp_ctlr == 0) event("switch_ac", "mission-planning");
            if (r.next_index > prev->next_index)
                event("target_visited", "index " + std::to_string(prev->next_index));
            if (!prev->mission_done && r.mission_done) event("mission_complete");
            if (!prev->ps_visit && r.ps_visit) event("station_visit");
            if (prev->nav_mode != static_cast<int>(NavMode::Hold) &&
                r.nav_mode == static_cast<int>(NavMode::Hold))
                event("backtrack_arrived");
        } else if (r.mission_done) {
            event("mission_complete");
        }
        if (r.recharged && (!prev || !prev->recharged)) event("recharge");
        if (es_mode && !bt_diag_seen && view.scalar("bt_diag") != 0.0) {
            bt_diag_seen = true;
            event("backtrack_diagnostic", "log exhausted away from a station");
        }

        // -------- forward/backward path bookkeeping --------
        if (es_mode) {
            const auto &log = view.poses("W");
            if (!log.empty() && log.front().tick != forward_anchor_tick) {
                forward_anchor_tick = log.front().tick;
                forward_path.clear();
                forward_path.push_back(log.front().pos);
            }
            if (r.mp_ctlr == 0) {
                forward_path.push_back(r.position);
            } else {
                if (!episode && prev && prev->mp_ctlr == 0) {
                    episode = BacktrackEpisode{};
                    episode->switch_tick = clock.tick;
                    episode->fe_at_switch = r.fe;
                }
                if (episode && r.nav_mode == static_cast<int>(NavMode::Backtrack)) {
                    episode->measured_backtrack += r.de;
                    back_path.push_back(r.position);
                }
                if (episode && (r.nav_mode == static_cast<int>(NavMode::Hold) || r.recharged))
                    close_episode(clock.tick);
            }
        }

        // -------- property verdicts --------
        auto violation = [&](const std::string &what, bool &flag) {
            if (flag) {
                result.failures.push_back(what + " violated at tick " + std::to_string(clock.tick));
                event("violation", what);
                if (!result.violation_tick) result.violation_tick = clock.tick;
            }
            flag = false;
        };
        if (es_mode) {
            r.es_ok = r.battery > 0.0 && r.battery > r.e_req;
            if (!r.es_ok) violation("energy safety", result.es_ok);
            r.cf_ok = r.d_o > 0.0;
            if (!r.cf_ok) violation("collision freedom", result.cf_ok);
            // coordinated switching: a recharge-mode decision upstream forces
            // the backtracking modes downstream at every navigation decision
            if (r.mp_ctlr == 1 && clock.tick % sc.period_nav == 0 &&
                r.nav_mode != static_cast<int>(NavMode::Turn) &&
                r.nav_mode != static_cast<int>(NavMode::Backtrack) &&
                r.nav_mode != static_cast<int>(NavMode::Hold)) {
                if (result.cases_ok)
                    result.failures.push_back("coordinated switch not honored at tick " +
                                              std::to_string(clock.tick));
                result.cases_ok = false;
            }
        } else {
            r.mc_ok = r.mission_done || clock.time() < sc.mc.deadline;
            if (!r.mc_ok) violation("mission completion", result.mc_ok);
            // every issued baseline command period stays within the leg bound
            if (view.scalar("mc_plan_running") != 0.0 || view.scalar("mc_plan_periods") != 0.0) {
                const double measured = view.scalar("mc_plan_periods") * t_nav;
                if (measured > view.scalar("mc_plan_tu") + 1e-9) {
                    if (result.legs_ok)
                        result.failures.push_back("baseline leg exceeded its time bound at tick " +
                                                  std::to_string(clock.tick));
                    result.legs_ok = false;
                }
            }
        }

        // -------- contract monitors --------
        for (auto &m : monitors) {
            const std::size_t before = m.violations().size();
            m.tick(view, clock);
            if (m.violations().size() > before) {
                if (result.monitors_ok) {
                    result.failures.push_back("contract guarantee of " +
                                              m.contract().component + " violated at tick " +
                                              std::to_string(clock.tick));
                }
                result.monitors_ok = false;
            }
        }

        // safety verdicts are monotone along the trace
        r.es_ok = r.es_ok && result.es_ok;
        r.cf_ok = r.cf_ok && result.cf_ok;
        r.mc_ok = r.mc_ok && result.mc_ok;
        result.records.push_back(r);
        if (opts.check_cases && es_mode) {
            const std::size_t before = result.failures.size();
            case_checker.on_record(result.records, result.failures);
            if (result.failures.size() > before) result.cases_ok = false;
        }

        // -------- stopping --------
        if (r.mission_done && (!prev || !prev->mission_done)) {
            result.mission_completed = true;
            result.completion_time = clock.time();
        }
        const bool violated = !result.properties_ok();
        if (violated && opts.fail_fast) {
            result.stop = StopCause::Violation;
            return ObserverAction::Abort;
        }
        if (result.mission_completed && episode == std::nullopt) {
            result.stop = StopCause::MissionComplete;
            return ObserverAction::Abort;
        }
        return ObserverAction::Continue;
    };

    RunOptions ropts;
    ropts.record_snapshots = false;
    ValueStore store = sys.initial_store;
    const Trace trace =
        run(sys.composition, store, sc.dt, sc.max_ticks, {harness_observer}, ropts);
    result.ticks_run = trace.ticks_run;
    if (!trace.aborted_at) result.stop = StopCause::MaxTicks;

    if (!opts.keep_records) {
        result.records.clear();
        result.records.shrink_to_fit();
    }
    return result;
}

} // namespace cbsa
