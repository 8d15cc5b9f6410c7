#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cbsa/contract.hpp"
#include "cbsa/store.hpp"

namespace cbsa {

/// Which controller of a Simplex instance is in control.
enum class Ctlr { AC, BC };

inline double ctlr_value(Ctlr c) { return c == Ctlr::BC ? 1.0 : 0.0; }
inline Ctlr ctlr_from(double v) { return v != 0.0 ? Ctlr::BC : Ctlr::AC; }

/// One Simplex instance: a decision-module predicate, an optional re-enable
/// predicate, and the wiring for coordinated switching.
///
/// `switch_in` names an upstream controller signal that, when BC, forces this
/// instance to BC for the decision (cascade); the instance's own latch is not
/// disturbed, so it resumes its own switching logic once the cascade lifts.
/// Without a re-enable predicate, BC is sticky forever.
struct SimplexInstance {
    std::string name;
    std::int64_t decision_period = 1;
    Pred switch_to_bc;                      ///< DM danger condition
    std::optional<Pred> reenable_ac;        ///< BC -> AC condition; nullopt = sticky
    std::optional<std::string> switch_in;   ///< hardwired upstream ctlr variable
    std::optional<std::string> switch_out;  ///< published ctlr variable
    Ctlr active = Ctlr::AC;
};

/// Decision-module step. Call only at ticks divisible by the decision period.
/// Returns the controller in charge for the coming period; the caller is
/// responsible for assigning the result to `switch_out` in the store.
inline Ctlr dm_decide(SimplexInstance &inst, const StoreView &view, const SimClock &clock) {
    if (inst.switch_in && ctlr_from(view.scalar(*inst.switch_in)) == Ctlr::BC) {
        return Ctlr::BC;  // coordinated switch from upstream dominates
    }
    if (inst.active == Ctlr::AC) {
        if (inst.switch_to_bc.eval(view, clock)) inst.active = Ctlr::BC;
    } else if (inst.reenable_ac && inst.reenable_ac->eval(view, clock)) {
        inst.active = Ctlr::AC;
    }
    return inst.active;
}

} // namespace cbsa
