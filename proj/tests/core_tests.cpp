#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cbsa/compose.hpp"
#include "cbsa/contract.hpp"
#include "cbsa/discharge.hpp"
#include "cbsa/exec.hpp"
#include "cbsa/simplex.hpp"

using namespace cbsa;

namespace {

// counter component: one state/output variable incremented every period
Component counter(const std::string &name, const std::string &var, std::int64_t period) {
    RateEntry entry;
    entry.period = period;
    entry.next_state = [var](const StoreView &v, std::int64_t) -> Assignments {
        return {{var, v.scalar(var) + 1.0}};
    };
    return Component(name, {var}, {}, {var}, {entry});
}

std::vector<double> column(const Trace &t, const std::string &var) {
    std::vector<double> out;
    for (const auto &snap : t.snapshots) out.push_back(as_scalar(snap.at(var)));
    return out;
}

} // namespace

TEST_CASE("composition variable sets with feedback") {
    Component m1("M1", {"s1"}, {"b"}, {"a"}, {});
    Component m2("M2", {"s2"}, {"a"}, {"b"}, {});
    Composition c = compose(m1, m2);

    CHECK(c.state_vars() == std::set<std::string>{"s1", "s2", "a", "b"});
    CHECK(c.input_vars().empty());
    CHECK(c.output_vars() == std::set<std::string>{"a", "b"});
    CHECK(c.hidden_vars() == std::set<std::string>{"a", "b"});
    CHECK(c.delayed_vars() == std::set<std::string>{"b"});
    // only the earlier part reads the back-edge at the previous tick
    CHECK(c.delayed_reads_for(0) == std::set<std::string>{"b"});
    CHECK(c.delayed_reads_for(1).empty());
}

TEST_CASE("composition without feedback is a plain union") {
    Component m1("M1", {"s1"}, {"u1"}, {"a"}, {});
    Component m2("M2", {"s2"}, {"u2"}, {"b"}, {});
    Composition c = compose(m1, m2);
    CHECK(c.state_vars() == std::set<std::string>{"s1", "s2"});
    CHECK(c.input_vars() == std::set<std::string>{"u1", "u2"});
    CHECK(c.output_vars() == std::set<std::string>{"a", "b"});
    CHECK(c.delayed_vars().empty());
}

TEST_CASE("composition rejects overlapping state or output sets") {
    Component m1("M1", {"s"}, {}, {"a"}, {});
    Component m2("M2", {"s"}, {}, {"b"}, {});
    CHECK_THROWS_AS(compose(m1, m2), CompositionError);
    Component m3("M3", {"s3"}, {}, {"a"}, {});
    CHECK_THROWS_AS(compose(m1, m3), CompositionError);
}

TEST_CASE("two counters at periods 1 and 2 over ticks 1..4") {
    Composition c = compose(counter("fast", "cf", 1), counter("slow", "cs", 2));
    ValueStore store;
    store.set("cf", 0.0);
    store.set("cs", 0.0);
    Trace t = run(c, store, 1.0, 4);
    CHECK(column(t, "cf") == std::vector<double>{1, 2, 3, 4});
    CHECK(column(t, "cs") == std::vector<double>{0, 1, 1, 2});
}

TEST_CASE("identity next-state leaves the store unchanged") {
    RateEntry entry;
    entry.period = 1;
    entry.next_state = [](const StoreView &, std::int64_t) -> Assignments { return {}; };
    Component id("id", {"x"}, {}, {}, {entry});
    ValueStore store;
    store.set("x", 7.0);
    Trace t = run(Composition(id), store, 1.0, 1);
    REQUIRE(t.snapshots.size() == 1);
    CHECK(as_scalar(t.snapshots[0].at("x")) == 7.0);
}

TEST_CASE("feedback echo is read one tick late") {
    RateEntry e1;
    e1.period = 1;
    e1.next_state = [](const StoreView &v, std::int64_t) -> Assignments {
        return {{"r", v.scalar("b")}};  // delayed back-edge read
    };
    e1.output = [](const StoreView &, std::int64_t tick) -> Assignments {
        return {{"a", static_cast<double>(tick)}};
    };
    Component m1("M1", {"r"}, {"b"}, {"a"}, {e1});

    RateEntry e2;
    e2.period = 1;
    e2.output = [](const StoreView &v, std::int64_t) -> Assignments {
        return {{"b", v.scalar("a")}};  // same-tick echo
    };
    Component m2("M2", {}, {"a"}, {"b"}, {e2});

    Composition c = compose(m1, m2);
    REQUIRE(c.delayed_vars() == std::set<std::string>{"b"});

    ValueStore store;
    store.set("a", 0.0);
    store.set("b", 0.0);
    store.set("r", 0.0);
    Trace t = run(c, store, 1.0, 3);
    CHECK(column(t, "a") == std::vector<double>{1, 2, 3});
    CHECK(column(t, "b") == std::vector<double>{1, 2, 3});
    CHECK(column(t, "r") == std::vector<double>{0, 1, 2});
}

TEST_CASE("associativity of composition over a three-stage chain") {
    auto make_chain = [] {
        RateEntry ea;
        ea.period = 1;
        ea.output = [](const StoreView &, std::int64_t tick) -> Assignments {
            return {{"a", static_cast<double>(tick)}};
        };
        Component A("A", {}, {}, {"a"}, {ea});
        RateEntry eb;
        eb.period = 2;
        eb.output = [](const StoreView &v, std::int64_t) -> Assignments {
            return {{"b", 2.0 * v.scalar("a")}};
        };
        Component B("B", {}, {"a"}, {"b"}, {eb});
        RateEntry ec;
        ec.period = 1;
        ec.output = [](const StoreView &v, std::int64_t) -> Assignments {
            return {{"c", v.scalar("b") + 1.0}};
        };
        Component C("C", {}, {"b"}, {"c"}, {ec});
        return std::tuple{A, B, C};
    };

    auto [a1, b1, c1] = make_chain();
    auto [a2, b2, c2] = make_chain();
    Composition left = compose(compose(a1, b1), c1);
    Composition right = compose(a2, compose(b2, c2));

    CHECK(left.state_vars() == right.state_vars());
    CHECK(left.input_vars() == right.input_vars());
    CHECK(left.output_vars() == right.output_vars());
    CHECK(left.delayed_vars() == right.delayed_vars());

    ValueStore s1, s2;
    for (auto *s : {&s1, &s2}) {
        s->set("a", 0.0);
        s->set("b", 0.0);
        s->set("c", 0.0);
    }
    Trace t1 = run(left, s1, 1.0, 10);
    Trace t2 = run(right, s2, 1.0, 10);
    REQUIRE(t1.snapshots.size() == t2.snapshots.size());
    for (std::size_t i = 0; i < t1.snapshots.size(); ++i) CHECK(t1.snapshots[i] == t2.snapshots[i]);
}

TEST_CASE("composition order matters for same-tick write/read pairs") {
    auto writer = [] {
        RateEntry e;
        e.period = 1;
        e.output = [](const StoreView &, std::int64_t tick) -> Assignments {
            return {{"s", static_cast<double>(tick)}};
        };
        return Component("P", {}, {}, {"s"}, {e});
    };
    auto reader = [] {
        RateEntry e;
        e.period = 1;
        e.output = [](const StoreView &v, std::int64_t) -> Assignments {
            return {{"t", v.scalar("s")}};
        };
        return Component("Q", {}, {"s"}, {"t"}, {e});
    };

    ValueStore s1, s2;
    for (auto *s : {&s1, &s2}) {
        s->set("s", 0.0);
        s->set("t", 0.0);
    }
    Trace pq = run(compose(writer(), reader()), s1, 1.0, 3);
    Trace qp = run(compose(reader(), writer()), s2, 1.0, 3);
    // (P,Q): Q sees this tick's write; (Q,P): Q sees the previous tick's value
    CHECK(column(pq, "t") == std::vector<double>{1, 2, 3});
    CHECK(column(qp, "t") == std::vector<double>{0, 1, 2});
}

TEST_CASE("determinism: identical inputs give identical traces") {
    for (int rep = 0; rep < 2; ++rep) {
        Composition c = compose(counter("fast", "cf", 1), counter("slow", "cs", 3));
        ValueStore a, b;
        for (auto *s : {&a, &b}) {
            s->set("cf", 0.0);
            s->set("cs", 0.0);
        }
        Trace t1 = run(c, a, 0.5, 20);
        Trace t2 = run(c, b, 0.5, 20);
        REQUIRE(t1.snapshots.size() == t2.snapshots.size());
        for (std::size_t i = 0; i < t1.snapshots.size(); ++i)
            CHECK(t1.snapshots[i] == t2.snapshots[i]);
    }
}

TEST_CASE("multi-rate containment and retention on random component graphs") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> ncomp(1, 4);
        std::uniform_int_distribution<std::int64_t> period(1, 4);
        int n = ncomp(rng);
        std::vector<Composition> parts;
        std::vector<std::pair<std::string, std::int64_t>> vars;
        for (int i = 0; i < n; ++i) {
            std::string var = "v" + std::to_string(trial) + "_" + std::to_string(i);
            std::int64_t p = period(rng);
            vars.emplace_back(var, p);
            parts.emplace_back(counter("c" + std::to_string(i), var, p));
        }
        Composition c = compose_all(parts);
        ValueStore store;
        for (auto &[var, p] : vars) store.set(var, 0.0);
        Trace t = run(c, store, 1.0, 24);
        for (auto &[var, p] : vars) {
            double prev = 0.0;
            for (std::int64_t i = 1; i <= 24; ++i) {
                double cur = as_scalar(t.snapshots[static_cast<std::size_t>(i - 1)].at(var));
                if (i % p == 0) {
                    CHECK(cur == prev + 1.0);  // containment: updates only at multiples
                } else {
                    CHECK(cur == prev);  // retention
                }
                prev = cur;
            }
        }
    }
}

TEST_CASE("observer abort stops the run at the violating tick") {
    Composition c = compose(counter("fast", "cf", 1), counter("slow", "cs", 2));
    ValueStore store;
    store.set("cf", 0.0);
    store.set("cs", 0.0);
    Observer guard = [](const StoreView &v, const SimClock &) {
        return v.scalar("cf") >= 3.0 ? ObserverAction::Abort : ObserverAction::Continue;
    };
    Trace t = run(c, store, 1.0, 100, {guard});
    REQUIRE(t.aborted_at.has_value());
    CHECK(*t.aborted_at == 3);
    CHECK(t.abort_reason == "ObserverAbort");
    CHECK(t.ticks_run == 3);
}

TEST_CASE("missing initial value and undeclared reads are rejected") {
    Composition c = compose(counter("fast", "cf", 1), counter("slow", "cs", 2));
    ValueStore store;
    store.set("cf", 0.0);  // cs missing
    CHECK_THROWS_AS(run(c, store, 1.0, 1), MissingValue);
    store.set("cs", 0.0);
    CHECK_THROWS_AS(run(c, store, 1.0, 0), BoundsError);

    RateEntry e;
    e.period = 1;
    e.next_state = [](const StoreView &v, std::int64_t) -> Assignments {
        return {{"x", v.scalar("not_mine")}};
    };
    Component sneaky("S", {"x"}, {}, {}, {e});
    ValueStore s2;
    s2.set("x", 0.0);
    s2.set("not_mine", 1.0);
    Composition cc(sneaky);
    SimClock clock{1.0, 1};
    CHECK_THROWS_AS(step(cc, s2, clock), MissingValue);
}

TEST_CASE("set-assignment semantics drop writes outside the declared sets") {
    RateEntry e;
    e.period = 1;
    e.next_state = [](const StoreView &, std::int64_t) -> Assignments {
        return {{"mine", 1.0}, {"other", 99.0}};
    };
    Component comp("C", {"mine"}, {}, {}, {e});
    ValueStore store;
    store.set("mine", 0.0);
    store.set("other", 0.0);
    SimClock clock{1.0, 1};
    Composition c(comp);
    step(c, store, clock);
    CHECK(as_scalar(store.get("mine")) == 1.0);
    CHECK(as_scalar(store.get("other")) == 0.0);
}

// ---------------------------------------------------------------------------
// contracts, monitors, simplex instances, discharge
// ---------------------------------------------------------------------------

TEST_CASE("vacuous implication never evaluates the consequent") {
    int consequent_evals = 0;
    Pred antecedent = Pred::of("ant", [](const StoreView &v, const SimClock &) {
        return v.scalar("flag") != 0.0;
    });
    Pred consequent = Pred::of("con", [&consequent_evals](const StoreView &, const SimClock &) {
        ++consequent_evals;
        return false;
    });
    Contract c{"C", {"flag"}, {}, implies(antecedent, consequent), Pred::always_true(), {"tok"}, {}};
    ContractMonitor mon(c, 1);

    ValueStore store;
    store.set("flag", 0.0);
    SimClock clock{1.0, 1};
    auto verdict = mon.tick(StoreView(store), clock);
    CHECK(verdict.assumption_met);
    CHECK(consequent_evals == 0);

    store.set("flag", 1.0);
    clock.tick = 2;
    verdict = mon.tick(StoreView(store), clock);
    CHECK_FALSE(verdict.assumption_met);
    CHECK(consequent_evals == 1);
}

TEST_CASE("monitor reports a violation at the first failing tick") {
    Pred g = Pred::of("x_le_2", [](const StoreView &v, const SimClock &) {
        return v.scalar("x") <= 2.0;
    });
    Contract c{"C", {"x"}, {}, Pred::always_true(), g, {"true"}, {"x_le_2"}};
    ContractMonitor mon(c, 2);
    ValueStore store;
    store.set("x", 0.0);
    mon.prime(StoreView(store));
    for (std::int64_t i = 1; i <= 5; ++i) {
        store.begin_tick();
        store.set("x", static_cast<double>(i));
        mon.tick(StoreView(store), SimClock{1.0, i});
    }
    REQUIRE(mon.violations().size() >= 1);
    CHECK(mon.violations().front().tick == 3);  // first tick with x > 2
}

TEST_CASE("dm_decide: cascade dominates, stickiness, re-enable") {
    Pred danger = Pred::of("danger", [](const StoreView &v, const SimClock &) {
        return v.scalar("d") != 0.0;
    });
    ValueStore store;
    store.set("up", 0.0);
    store.set("d", 0.0);
    SimClock clock{1.0, 4};

    SUBCASE("cascade forces BC even when the local condition is false") {
        SimplexInstance inst{"nav", 2, danger, std::nullopt, "up", std::nullopt};
        store.set("up", 1.0);
        CHECK(dm_decide(inst, StoreView(store), clock) == Ctlr::BC);
        // local latch untouched: once the cascade lifts the instance resumes AC
        store.set("up", 0.0);
        CHECK(dm_decide(inst, StoreView(store), clock) == Ctlr::AC);
    }

    SUBCASE("no cascade and no danger keeps AC") {
        SimplexInstance inst{"mp", 4, danger, std::nullopt, std::nullopt, std::nullopt};
        CHECK(dm_decide(inst, StoreView(store), clock) == Ctlr::AC);
    }

    SUBCASE("BC is sticky without a re-enable predicate") {
        SimplexInstance inst{"mp", 4, danger, std::nullopt, std::nullopt, std::nullopt};
        store.set("d", 1.0);
        CHECK(dm_decide(inst, StoreView(store), clock) == Ctlr::BC);
        store.set("d", 0.0);
        CHECK(dm_decide(inst, StoreView(store), clock) == Ctlr::BC);
    }

    SUBCASE("re-enable predicate returns control to AC") {
        SimplexInstance inst{"mp", 4, danger, !danger, std::nullopt, std::nullopt};
        store.set("d", 1.0);
        CHECK(dm_decide(inst, StoreView(store), clock) == Ctlr::BC);
        store.set("d", 0.0);
        CHECK(dm_decide(inst, StoreView(store), clock) == Ctlr::AC);
    }
}

namespace {

DischargeGraph rover_graph() {
    DischargeGraph g;
    Contract mp{"MissionPlanning", {}, {}, {}, {}, {"A_BE"}, {"ES"}};
    Contract nav{"Navigation", {}, {}, {}, {}, {"A_P"}, {"CF", "A_BE"}};
    Contract plant{"Plant", {}, {}, {}, {}, {"true"}, {"A_P"}};
    g.add_contract(mp);
    g.add_contract(nav);
    g.add_contract(plant);
    return g;
}

} // namespace

TEST_CASE("discharge passes on the rover wiring") {
    DischargeReport r = check_discharge(rover_graph());
    CHECK(r.passed);
    CHECK(r.uncovered_assumptions.empty());
}

TEST_CASE("discharge fails with the uncovered token when a guarantee is removed") {
    DischargeGraph g;
    Contract mp{"MissionPlanning", {}, {}, {}, {}, {"A_BE"}, {"ES"}};
    Contract nav{"Navigation", {}, {}, {}, {}, {"A_P"}, {"CF"}};  // A_BE guarantee removed
    Contract plant{"Plant", {}, {}, {}, {}, {"true"}, {"A_P"}};
    g.add_contract(mp);
    g.add_contract(nav);
    g.add_contract(plant);
    DischargeReport r = check_discharge(g);
    CHECK_FALSE(r.passed);
    REQUIRE(r.uncovered_assumptions.size() == 1);
    CHECK(r.uncovered_assumptions.front() == "MissionPlanning:A_BE");
}

TEST_CASE("single component with the trivial assumption passes") {
    DischargeGraph g;
    Contract solo{"Solo", {}, {}, {}, {}, {"true"}, {"G"}};
    g.add_contract(solo);
    DischargeReport r = check_discharge(g);
    CHECK(r.passed);
}

TEST_CASE("circular discharge is rejected unless the edge is delayed") {
    DischargeGraph g;
    Contract a{"A", {}, {}, {}, {}, {"p"}, {"q"}};
    Contract b{"B", {}, {}, {}, {}, {"q"}, {"p"}};
    g.add_contract(a);
    g.add_contract(b);
    CHECK_FALSE(check_discharge(g).passed);

    DischargeGraph g2 = g;
    g2.mark_delayed("A", "B");  // q travels over a feedback-delayed variable
    CHECK(check_discharge(g2).passed);
}
