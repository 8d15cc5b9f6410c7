#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "cbsa/errors.hpp"
#include "cbsa/value.hpp"

namespace cbsa {

/// Global discrete clock. Ticks advance by exactly 1; wall time is tick * dt.
struct SimClock {
    double dt = 1.0;         ///< seconds per global tick
    std::int64_t tick = 0;   ///< current tick index

    double time() const { return dt * static_cast<double>(tick); }
};

/// Shared-variable store with the previous-tick snapshot kept around so that
/// feedback-delayed variables can be read at their tick i-1 value.
///
/// A variable that no rate function updates at tick i retains its tick i-1
/// value; this falls out of the map simply not being touched.
class ValueStore {
  public:
    ValueStore() = default;

    void set(const std::string &name, Value v) { current_[name] = std::move(v); }

    bool contains(const std::string &name) const { return current_.count(name) != 0; }

    const Value &get(const std::string &name) const {
        auto it = current_.find(name);
        if (it == current_.end()) throw MissingValue("unset variable '" + name + "'");
        return it->second;
    }

    const Value &get_previous(const std::string &name) const {
        auto it = previous_.find(name);
        if (it == previous_.end()) throw MissingValue("unset variable '" + name + "' (previous tick)");
        return it->second;
    }

    /// Snapshot the current values; called by the scheduler at the start of
    /// every tick before any rate function fires.
    void begin_tick() { previous_ = current_; }

    const std::map<std::string, Value> &values() const { return current_; }

  private:
    std::map<std::string, Value> current_;
    std::map<std::string, Value> previous_;
};

/// Read-only view handed to rate functions and predicates.
///
/// Reads are restricted to the owning component's declared variables (when an
/// allowed set is given) and feedback-delayed variables resolve to the
/// previous-tick snapshot. Monitors and observers use an unrestricted view.
class StoreView {
  public:
    StoreView(const ValueStore &store,
              const std::set<std::string> *delayed = nullptr,
              const std::set<std::string> *allowed = nullptr)
        : store_(store), delayed_(delayed), allowed_(allowed) {}

    const Value &get(const std::string &name) const {
        if (allowed_ && allowed_->count(name) == 0)
            throw MissingValue("variable '" + name + "' is not declared by the reading component");
        if (delayed_ && delayed_->count(name) != 0) return store_.get_previous(name);
        return store_.get(name);
    }

    double scalar(const std::string &name) const { return as_scalar(get(name), name); }
    Vec2 vec2(const std::string &name) const { return as_vec2(get(name), name); }
    const std::vector<double> &seq(const std::string &name) const { return as_seq(get(name), name); }
    const std::vector<PoseStamp> &poses(const std::string &name) const {
        return as_poses(get(name), name);
    }

    const ValueStore &store() const { return store_; }

  private:
    const ValueStore &store_;
    const std::set<std::string> *delayed_;
    const std::set<std::string> *allowed_;
};

} // namespace cbsa
