#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbsa/errors.hpp"
#include "cbsa/store.hpp"

namespace cbsa {

enum class VarKind { State, Input, Output };

/// A variable declaration. Variables with the same name in different
/// components refer to the same shared store slot.
struct VarId {
    std::string name;
    VarKind kind = VarKind::State;
};

/// Assignments returned by a rate function. Names outside the function's
/// declared target set are ignored, mirroring the set-assignment semantics of
/// the component model.
using Assignments = std::vector<std::pair<std::string, Value>>;

/// A pure map from (read view of the store, tick) to variable assignments.
using StepFn = std::function<Assignments(const StoreView &, std::int64_t)>;

/// One (next-state function, output function, update period) schedule entry.
/// The period is a positive integer multiple of the global tick.
struct RateEntry {
    StepFn next_state;         ///< writes state variables; may be null
    StepFn output;             ///< writes output variables; may be null
    std::int64_t period = 1;
};

/// A multi-rate component: disjoint input/output variable sets, a state set,
/// and an ordered schedule of rate entries.
class Component {
  public:
    Component() = default;

    Component(std::string name,
              std::set<std::string> state_vars,
              std::set<std::string> input_vars,
              std::set<std::string> output_vars,
              std::vector<RateEntry> schedule)
        : name_(std::move(name)),
          state_(std::move(state_vars)),
          inputs_(std::move(input_vars)),
          outputs_(std::move(output_vars)),
          schedule_(std::move(schedule)) {
        for (const auto &v : inputs_)
            if (outputs_.count(v))
                throw CompositionError("component '" + name_ + "': variable '" + v +
                                       "' is both input and output");
        for (const auto &e : schedule_)
            if (e.period < 1)
                throw CompositionError("component '" + name_ + "': update period must be >= 1");
    }

    const std::string &name() const { return name_; }
    const std::set<std::string> &state_vars() const { return state_; }
    const std::set<std::string> &input_vars() const { return inputs_; }
    const std::set<std::string> &output_vars() const { return outputs_; }
    const std::vector<RateEntry> &schedule() const { return schedule_; }

    /// Variables this component's functions may read: state and inputs plus
    /// its own outputs (outputs synchronized with state share names anyway).
    std::set<std::string> readable_vars() const {
        std::set<std::string> r = state_;
        r.insert(inputs_.begin(), inputs_.end());
        r.insert(outputs_.begin(), outputs_.end());
        return r;
    }

  private:
    std::string name_;
    std::set<std::string> state_;
    std::set<std::string> inputs_;
    std::set<std::string> outputs_;
    std::vector<RateEntry> schedule_;
};

namespace detail {

inline std::set<std::string> set_union(const std::set<std::string> &a,
                                       const std::set<std::string> &b) {
    std::set<std::string> r = a;
    r.insert(b.begin(), b.end());
    return r;
}

inline std::set<std::string> set_intersect(const std::set<std::string> &a,
                                           const std::set<std::string> &b) {
    std::set<std::string> r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.begin()));
    return r;
}

inline std::set<std::string> set_minus(const std::set<std::string> &a,
                                       const std::set<std::string> &b) {
    std::set<std::string> r;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.begin()));
    return r;
}

} // namespace detail

} // namespace cbsa
