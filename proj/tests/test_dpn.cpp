#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "random_nets.hpp"
#include "support.hpp"

#include "dpnsound/dds.hpp"
#include "dpnsound/errors.hpp"

#include <algorithm>
#include <set>

using namespace dpnsound;
using testing::gateway;
using testing::model;

namespace {

const Var o{"o", Sort::Rat};
const Var t{"t", Sort::Rat};

DpnState initial(const Dpn& dpn) { return {dpn.initial_marking, dpn.initial_assignment}; }

Marking marking(std::initializer_list<const char*> places)
{
    Marking m;
    for (const char* p : places)
        m.add(p, 1);
    return m;
}

TransitionFiring firing(const Dpn& dpn, const DpnState& s, const std::string& id, Assignment written)
{
    return {id, make_beta(dpn, s, dpn.transition(id), written)};
}

Assignment writes(std::initializer_list<std::pair<Var, int>> values)
{
    Assignment a;
    for (const auto& [v, n] : values)
        a.set(v.written(), Rational(n));
    return a;
}

} // namespace

TEST_CASE("auction net structure")
{
    Dpn dpn = model("auction");
    CHECK(validate(dpn).empty());
    CHECK(dpn.places.size() == 4);
    CHECK(dpn.transitions.size() == 4);
    CHECK(dpn.initial_marking == marking({"p0"}));
    CHECK(dpn.final_marking == marking({"p3"}));
    CHECK(dpn.initial_assignment.number(o) == 0);
    CHECK(dpn.initial_assignment.number(t) == 0);
    CHECK(dpn.preset(dpn.transition("hammer")) == marking({"p1", "p2"}));
    CHECK(dpn.postset(dpn.transition("init")) == marking({"p1", "p2"}));
}

TEST_CASE("markings")
{
    Marking a = marking({"p1", "p2"});
    Marking f = marking({"p2"});
    CHECK(a.covers(f));
    CHECK_FALSE(f.covers(a));
    CHECK(a.total() == 2);
    CHECK(to_string(a) == "{p1, p2}");
    Marking b = a;
    b.add("p1", 1);
    CHECK(to_string(b) == "{2*p1, p2}");
    b.set("p1", 0);
    CHECK(b == f);
}

TEST_CASE("enabled firings")
{
    Dpn dpn = model("auction");
    DpnState s0 = initial(dpn);
    SUBCASE("init from the initial state")
    {
        auto f = enabled_firing(dpn, s0, "init", gateway());
        REQUIRE(f);
        DpnState s1 = fire(dpn, s0, *f);
        CHECK(s1.marking == marking({"p1", "p2"}));
        CHECK(s1.assignment.number(t) > 0);
        CHECK(s1.assignment.number(o) == 0);
    }
    SUBCASE("hammer needs an expired timer")
    {
        DpnState s{marking({"p1", "p2"}), {}};
        s.assignment.set(o, Rational(0));
        s.assignment.set(t, Rational(1));
        CHECK_FALSE(enabled_firing(dpn, s, "hammer", gateway()));
        s.assignment.set(o, Rational(3));
        s.assignment.set(t, Rational(0));
        CHECK(enabled_firing(dpn, s, "hammer", gateway()));
    }
    SUBCASE("no tokens")
    {
        DpnState empty{Marking{}, dpn.initial_assignment};
        for (const auto& tr : dpn.transitions)
            CHECK_FALSE(enabled_firing(dpn, empty, tr.id, gateway()));
    }
}

TEST_CASE("fire")
{
    Dpn dpn = model("auction");
    DpnState s0 = initial(dpn);
    DpnState s1 = fire(dpn, s0, firing(dpn, s0, "init", writes({{t, 1}, {o, 0}})));
    CHECK(s1.marking == marking({"p1", "p2"}));
    CHECK(s1.assignment.number(t) == 1);
    CHECK(s1.assignment.number(o) == 0);

    DpnState s2 = fire(dpn, s1, firing(dpn, s1, "timer", writes({{t, 0}})));
    CHECK(s2.marking == marking({"p1", "p2"}));
    CHECK(s2.assignment.number(t) == 0);
    CHECK(s2.assignment.number(o) == 0);

    SUBCASE("blocked after the timer expires without bids")
    {
        for (const auto& tr : dpn.transitions)
            CHECK_FALSE(enabled_firing(dpn, s2, tr.id, gateway()));
    }
    SUBCASE("write-free firing keeps values")
    {
        DpnState s{marking({"p1", "p2"}), {}};
        s.assignment.set(o, Rational(5));
        s.assignment.set(t, Rational(-1));
        DpnState next = fire(dpn, s, firing(dpn, s, "hammer", {}));
        CHECK(next.assignment == s.assignment);
        CHECK(next.marking == marking({"p3"}));
    }
    SUBCASE("rejections")
    {
        CHECK_THROWS_AS(fire(dpn, s0, firing(dpn, s0, "bid", writes({{o, 1}}))), NotEnabled);
        CHECK_THROWS_AS(fire(dpn, s0, firing(dpn, s0, "init", writes({{t, 0}}))), NotEnabled);
        TransitionFiring stale = firing(dpn, s1, "timer", writes({{t, 0}}));
        stale.beta.set(t.read(), Rational(7));
        CHECK_THROWS_AS(fire(dpn, s1, stale), NotEnabled);
    }
}

TEST_CASE("validation")
{
    SUBCASE("undeclared variable")
    {
        DpnBuilder b("bad");
        b.place("p", 1, 0).place("q", 0, 1).variable("x", Sort::Int).transition("t", "z > 0").arc("p", "t").arc("t", "q");
        CHECK_THROWS_AS((void)b.build(), UndeclaredVariable);
    }
    SUBCASE("id clash")
    {
        Dpn dpn = model("sound_trivial");
        dpn.transitions.push_back({"start", "start", Constraint::truth()});
        auto diags = validate(dpn);
        REQUIRE_FALSE(diags.empty());
        CHECK(std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.kind == "IdClash"; }));
    }
    SUBCASE("unknown arc endpoint")
    {
        DpnBuilder b("bad");
        b.place("p", 1, 0).place("q", 0, 1).transition("t").arc("p", "t").arc("t", "nowhere");
        CHECK_THROWS_AS((void)b.build(), UnknownReference);
    }
    SUBCASE("empty net")
    {
        Dpn dpn;
        auto diags = validate(dpn);
        CHECK(std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.kind == "EmptyNet"; }));
    }
}

TEST_CASE("DDS unfolding")
{
    SUBCASE("auction")
    {
        Dds dds = dpn_to_dds(model("auction"), 1);
        REQUIRE(dds.states.size() == 3);
        std::set<std::string> names;
        for (std::size_t s = 0; s < dds.states.size(); ++s)
            names.insert(dds.state_name(s));
        CHECK(names == std::set<std::string>{"{p0}", "{p1, p2}", "{p3}"});
        CHECK(dds.state_name(dds.final_state) == "{p3}");
        std::multiset<std::string> edges;
        for (const auto& e : dds.edges)
            edges.insert(dds.state_name(e.source) + " " + e.action + " " + dds.state_name(e.target));
        CHECK(edges == std::multiset<std::string>{"{p0} init {p1, p2}", "{p1, p2} bid {p1, p2}",
                                                   "{p1, p2} timer {p1, p2}", "{p1, p2} hammer {p3}"});
    }
    SUBCASE("thresh adds p23")
    {
        Dds dds = dpn_to_dds(model("auction_thresh"), 1);
        auto p23 = dds.find(marking({"p2", "p3"}));
        REQUIRE(p23);
        std::set<std::string> out;
        for (std::size_t e : dds.outgoing[*p23])
            out.insert(dds.edges[e].action);
        CHECK(out == std::set<std::string>{"timer"});
        CHECK(dds.states.size() == 4);
    }
    SUBCASE("initial equals final, no transitions")
    {
        // not a valid net (no transitions), but the unfolding itself is defined
        Dpn dpn;
        dpn.id = "idle";
        dpn.places.push_back({"p", "p"});
        dpn.initial_marking.set("p", 1);
        dpn.final_marking.set("p", 1);
        CHECK_FALSE(validate(dpn).empty());
        Dds dds = dpn_to_dds(dpn, 1);
        CHECK(dds.states.size() == 1);
        CHECK(dds.is_final(dds.initial));
        CHECK(dds.edges.empty());
    }
    SUBCASE("bound exceeded")
    {
        Dpn dpn = DpnBuilder("pump").place("p", 1, 0).place("q", 0, 1).transition("t").arc("p", "t").arc("t", "p").arc("t", "q").build();
        CHECK_THROWS_AS(dpn_to_dds(dpn, 1), BoundExceeded);
        CHECK_THROWS_AS(dpn_to_dds(dpn, 3), BoundExceeded);
    }
    SUBCASE("same-label transitions stay distinct")
    {
        Dds dds = dpn_to_dds(model("road_fines"), 1);
        std::set<std::string> payments;
        for (const auto& e : dds.edges)
            if (e.action == "payment")
                payments.insert(e.transition);
        CHECK(payments == std::set<std::string>{"payment_p2", "payment_p3", "payment_p4"});
    }
    SUBCASE("steps")
    {
        Dpn dpn = model("auction");
        Dds dds = dpn_to_dds(dpn, 1);
        DdsConfig c0{dds.initial, dds.initial_assignment};
        DpnState s0 = initial(dpn);
        DdsConfig c1 = dds_step(dds, c0, firing(dpn, s0, "init", writes({{t, 1}, {o, 0}})));
        CHECK(dds.state_name(c1.state) == "{p1, p2}");
        CHECK(c1.assignment.number(t) == 1);
        DpnState s1{marking({"p1", "p2"}), c1.assignment};
        DdsConfig c2 = dds_step(dds, c1, firing(dpn, s1, "timer", writes({{t, 0}})));
        CHECK(c2.assignment.number(t) == 0);
        CHECK_THROWS_AS(dds_step(dds, c2, firing(dpn, {marking({"p1", "p2"}), c2.assignment}, "timer", writes({{t, -1}}))),
                        NotEnabled);
        CHECK_THROWS_AS(dds_step(dds, c0, firing(dpn, s0, "hammer", {})), NotEnabled);
    }
}

TEST_CASE("random nets: conservation, frame and co-simulation with the DDS")
{
    std::mt19937 rng(2024);
    std::size_t runs = 0, steps = 0;
    for (int n = 0; runs < 1000; ++n) {
        Dpn dpn = testing::random_net(rng, n);
        Dds dds = dpn_to_dds(dpn, 1);
        for (int r = 0; r < 20 && runs < 1000; ++r, ++runs) {
            DpnState s = initial(dpn);
            DdsConfig c{dds.initial, dds.initial_assignment};
            for (int len = 0; len < 8; ++len) {
                REQUIRE(dds.states[c.state] == s.marking);
                REQUIRE(c.assignment == s.assignment);
                // random candidate firing, enabled or not
                const Transition& tr = dpn.transitions[std::uniform_int_distribution<std::size_t>(0, dpn.transitions.size() - 1)(rng)];
                Assignment w;
                for (const auto& v : write_vars(tr.guard))
                    w.set(v.written(), Rational(std::uniform_int_distribution<int>(-2, 2)(rng)));
                TransitionFiring f{tr.id, make_beta(dpn, s, tr, w)};
                bool dpn_ok = true, dds_ok = true;
                DpnState next;
                DdsConfig cnext;
                try {
                    next = fire(dpn, s, f);
                } catch (const NotEnabled&) {
                    dpn_ok = false;
                }
                try {
                    cnext = dds_step(dds, c, f);
                } catch (const NotEnabled&) {
                    dds_ok = false;
                }
                REQUIRE(dpn_ok == dds_ok);
                if (!dpn_ok)
                    continue;
                ++steps;
                CHECK(next.marking.total() + dpn.preset(tr).total() == s.marking.total() + dpn.postset(tr).total());
                auto written = write_vars(tr.guard);
                for (const auto& v : dpn.variables)
                    if (!written.contains(v))
                        CHECK(next.assignment.at(v) == s.assignment.at(v));
                CHECK(fire(dpn, s, f) == next);
                s = next;
                c = cnext;
            }
        }
    }
    CHECK(steps > 500);
}
