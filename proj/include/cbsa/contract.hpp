#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbsa/store.hpp"

namespace cbsa {

/// A named predicate over the store. Predicates compose; an implication
/// short-circuits so that a false antecedent never evaluates the consequent
/// (vacuous satisfaction).
class Pred {
  public:
    using Fn = std::function<bool(const StoreView &, const SimClock &)>;

    Pred() : label_("true"), fn_([](const StoreView &, const SimClock &) { return true; }) {}

    static Pred always_true() { return Pred(); }

    static Pred of(std::string label, Fn fn) {
        Pred p;
        p.label_ = std::move(label);
        p.fn_ = std::move(fn);
        return p;
    }

    bool eval(const StoreView &view, const SimClock &clock) const { return fn_(view, clock); }
    const std::string &label() const { return label_; }

    friend Pred operator&&(const Pred &a, const Pred &b) {
        return Pred::of(a.label_ + " && " + b.label_,
                        [a, b](const StoreView &v, const SimClock &c) {
                            return a.eval(v, c) && b.eval(v, c);
                        });
    }

    friend Pred operator!(const Pred &a) {
        return Pred::of("!(" + a.label_ + ")",
                        [a](const StoreView &v, const SimClock &c) { return !a.eval(v, c); });
    }

  private:
    std::string label_;
    Fn fn_;
};

/// antecedent => consequent, evaluated lazily.
inline Pred implies(const Pred &antecedent, const Pred &consequent) {
    return Pred::of(antecedent.label() + " => " + consequent.label(),
                    [antecedent, consequent](const StoreView &v, const SimClock &c) {
                        if (!antecedent.eval(v, c)) return true;
                        return consequent.eval(v, c);
                    });
}

/// An assume-guarantee contract (I, O, A, G) plus the named tokens used by
/// the static discharge checker. Tokens name the predicate formulas; the
/// semantic correspondence is checked at runtime by the monitors.
struct Contract {
    std::string component;
    std::set<std::string> inputs;
    std::set<std::string> outputs;
    Pred assumption;
    Pred guarantee;
    std::set<std::string> assumption_tokens;  ///< "true" marks the trivial assumption
    std::set<std::string> guarantee_tokens;
};

/// Assume-guarantee triple: the component guarantees `guarantee` through the
/// next period of `period` ticks given `assumption` at the period start.
struct AGTriple {
    std::string component;
    std::int64_t period = 1;
    Pred assumption;
    Pred guarantee;
};

struct MonitorVerdict {
    bool assumption_met = true;
    bool guarantee_met = true;
};

struct ViolationEvent {
    std::int64_t tick = 0;
    std::string component;
    std::string what;  ///< "guarantee" or "assumption"
};

/// Runtime monitor for one contract at a fixed decision period.
///
/// The assumption is re-evaluated at every period start; a violation is
/// recorded at the first tick where the guarantee fails while the assumption
/// held at the enclosing period's start. Call prime() with the initial store
/// so the first partial period is armed correctly.
class ContractMonitor {
  public:
    ContractMonitor(Contract contract, std::int64_t period)
        : contract_(std::move(contract)), period_(period) {}

    void prime(const StoreView &view, const SimClock &clock = {}) {
        armed_ = contract_.assumption.eval(view, clock);
        primed_ = true;
    }

    /// Evaluate the contract on the post-tick store. Returns the verdict for
    /// this tick and records the first in-period guarantee violation.
    MonitorVerdict tick(const StoreView &view, const SimClock &clock) {
        MonitorVerdict v;
        v.assumption_met = contract_.assumption.eval(view, clock);
        v.guarantee_met = contract_.guarantee.eval(view, clock);
        if (!primed_) {
            armed_ = v.assumption_met;
            primed_ = true;
        }
        if (!v.guarantee_met && armed_) {
            violations_.push_back({clock.tick, contract_.component, "guarantee"});
        }
        if (clock.tick % period_ == 0) armed_ = v.assumption_met;
        return v;
    }

    const Contract &contract() const { return contract_; }
    std::int64_t period() const { return period_; }
    const std::vector<ViolationEvent> &violations() const { return violations_; }

  private:
    Contract contract_;
    std::int64_t period_;
    bool armed_ = false;
    bool primed_ = false;
    std::vector<ViolationEvent> violations_;
};

} // namespace cbsa
