#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbsa/compose.hpp"
#include "cbsa/store.hpp"

namespace cbsa {

/// What an observer wants the scheduler to do after inspecting a tick.
enum class ObserverAction { Continue, Abort };

/// Invoked after every completed tick with an unrestricted view of the store.
using Observer = std::function<ObserverAction(const StoreView &, const SimClock &)>;

/// Per-tick log of a run. Snapshots are post-tick store states (tick 1..n);
/// recording can be disabled for long runs whose observers keep their own
/// summaries.
struct Trace {
    std::vector<std::map<std::string, Value>> snapshots;
    std::int64_t ticks_run = 0;
    std::optional<std::int64_t> aborted_at;  ///< tick of the observer abort, if any
    std::string abort_reason;
};

/// Advance the composition by one tick.
///
/// Parts execute in declared order; within a part, rate entries whose period
/// divides the tick fire in schedule order, next-state function before output
/// function. Assignments outside a function's declared target set are dropped
/// (set-assignment semantics); variables nobody assigns keep their values.
inline void step(const Composition &comp, ValueStore &store, const SimClock &clock) {
    store.begin_tick();
    for (std::size_t k = 0; k < comp.parts().size(); ++k) {
        const Component &part = comp.parts()[k];
        const StoreView view(store, &comp.delayed_reads_for(k), &comp.readable_for(k));
        for (const RateEntry &entry : part.schedule()) {
            if (clock.tick % entry.period != 0) continue;
            if (entry.next_state) {
                for (auto &[name, value] : entry.next_state(view, clock.tick))
                    if (part.state_vars().count(name)) store.set(name, std::move(value));
            }
            if (entry.output) {
                for (auto &[name, value] : entry.output(view, clock.tick))
                    if (part.output_vars().count(name)) store.set(name, std::move(value));
            }
        }
    }
}

struct RunOptions {
    bool record_snapshots = true;
};

/// Run the composition for `ticks` ticks (tick indices 1..ticks), invoking
/// each observer after every tick. An observer returning Abort stops the run;
/// the trace then carries the aborting tick and reason "ObserverAbort".
inline Trace run(const Composition &comp, ValueStore &store, double dt, std::int64_t ticks,
                 const std::vector<Observer> &observers = {}, const RunOptions &opts = {}) {
    if (ticks < 1) throw BoundsError("run requires ticks >= 1");
    for (const auto &v : comp.all_vars())
        if (!store.contains(v)) throw MissingValue("initial store lacks variable '" + v + "'");

    Trace trace;
    if (opts.record_snapshots) trace.snapshots.reserve(static_cast<std::size_t>(ticks));
    SimClock clock{dt, 0};
    for (std::int64_t i = 1; i <= ticks; ++i) {
        clock.tick = i;
        step(comp, store, clock);
        trace.ticks_run = i;
        if (opts.record_snapshots) trace.snapshots.push_back(store.values());
        for (const Observer &obs : observers) {
            if (obs(StoreView(store), clock) == ObserverAction::Abort) {
                trace.aborted_at = i;
                trace.abort_reason = "ObserverAbort";
                return trace;
            }
        }
    }
    return trace;
}

} // namespace cbsa
