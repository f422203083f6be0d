#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "dpnsound/errors.hpp"
#include "dpnsound/soundness.hpp"

using namespace dpnsound;
using testing::gateway;
using testing::model;

namespace {

// Replays the run with the net's own firing rule.
void check_replay(const Dpn& dpn, const Witness& w)
{
    CHECK(w.initial.marking == dpn.initial_marking);
    CHECK(w.initial.assignment == dpn.initial_assignment);
    DpnState s = w.initial;
    for (const auto& step : w.steps) {
        REQUIRE_NOTHROW(s = fire(dpn, s, step.firing));
        CHECK(s == step.state);
    }
    CHECK(w.steps.size() == w.cg_path.size());
}

std::vector<std::string> transitions(const Witness& w)
{
    std::vector<std::string> out;
    for (const auto& s : w.steps)
        out.push_back(s.firing.transition);
    return out;
}

Rational number(const DpnState& s, const std::string& name)
{
    return s.assignment.number(Var{name, Sort::Int});
}

} // namespace

TEST_CASE("auction: blocked state")
{
    Dpn dpn = model("auction");
    SoundnessReport r = check_sound(dpn, {}, gateway());
    REQUIRE(r.sound.has_value());
    CHECK_FALSE(*r.sound);
    CHECK(r.violated == Property::P1);
    CHECK(r.dead_transitions.empty());
    CHECK(r.dds_size == std::make_pair<std::size_t, std::size_t>(3, 4));
    CHECK(r.cg_size == std::make_pair<std::size_t, std::size_t>(6, 10));
    REQUIRE(r.witness);
    check_replay(dpn, *r.witness);
    CHECK(transitions(*r.witness) == std::vector<std::string>{"init", "timer"});
    const DpnState& end = r.witness->last();
    Var o{"o", Sort::Rat}, t{"t", Sort::Rat};
    CHECK(end.assignment.number(o) == 0);
    CHECK(end.assignment.number(t) <= 0);
    // nothing can fire any more
    for (const auto& tr : dpn.transitions)
        CHECK_FALSE(enabled_firing(dpn, end, tr.id, gateway()));
    REQUIRE(r.violations.size() == 1);
    REQUIRE(r.violations[0].blocked_formula);
    CHECK(gateway().equivalent(*r.violations[0].blocked_formula, testing::auction_formula("o0 == 0 && t0 <= 0")));
    CHECK(r.stats.sat_checks > 0);
    CHECK(r.stats.qe_calls > 0);
}

TEST_CASE("auction with reset: dead transition")
{
    Dpn dpn = model("auction_reset");
    SoundnessReport r = check_sound(dpn, {}, gateway());
    CHECK(r.sound == false);
    CHECK(r.violated == Property::P3);
    CHECK(r.dead_transitions == std::vector<std::string>{"reset"});
    CHECK_FALSE(r.witness);

    CheckConfig all;
    all.short_circuit = false;
    SoundnessReport every = check_sound(dpn, all, gateway());
    CHECK(every.violated == Property::P3);
    // the blocked (p12, o=0) node is still there
    bool p1 = false;
    for (const auto& v : every.violations)
        if (v.property == Property::P1) {
            p1 = true;
            REQUIRE(v.witness);
            check_replay(dpn, *v.witness);
        }
    CHECK(p1);
}

TEST_CASE("auction with threshold: improper termination")
{
    Dpn dpn = model("auction_thresh");
    SoundnessReport r = check_sound(dpn, {}, gateway());
    CHECK(r.sound == false);
    CHECK(r.violated == Property::P2);
    REQUIRE(r.witness);
    check_replay(dpn, *r.witness);
    CHECK(transitions(*r.witness) == std::vector<std::string>{"init", "bid", "thresh"});
    CHECK(r.witness->last().marking == (Marking{{"p2", 1}, {"p3", 1}}));
    CHECK(r.witness->last().assignment.number(Var{"o", Sort::Rat}) > 1000);
}

TEST_CASE("sound net")
{
    Dpn dpn = model("sound_trivial");
    SoundnessReport r = check_sound(dpn, {}, gateway());
    CHECK(r.sound == true);
    CHECK_FALSE(r.violated);
    CHECK_FALSE(r.witness);
    CHECK(r.violations.empty());
    CHECK(r.error.empty());
}

TEST_CASE("road fines")
{
    Dpn dpn = model("road_fines");
    SoundnessReport r = check_sound(dpn, {}, gateway());
    CHECK(r.sound == false);
    CHECK(r.violated == Property::P1);
    REQUIRE(r.witness);
    check_replay(dpn, *r.witness);

    CheckConfig all;
    all.short_circuit = false;
    SoundnessReport every = check_sound(dpn, all, gateway());
    std::size_t at_p7 = 0;
    for (const auto& v : every.violations) {
        CHECK(v.property == Property::P1);
        REQUIRE(v.witness);
        check_replay(dpn, *v.witness);
        const DpnState& end = v.witness->last();
        if (end.marking == Marking{{"p7", 1}}) {
            ++at_p7;
            CHECK(number(end, "d") > 1);
            CHECK(transitions(*v.witness).back() == "send_to_prefecture");
        }
    }
    CHECK(at_p7 > 0);
}

TEST_CASE("parallel continuations agree")
{
    for (const char* name : {"auction", "auction_reset", "sound_trivial"}) {
        CAPTURE(name);
        Dpn dpn = model(name);
        CheckConfig one, two;
        one.short_circuit = two.short_circuit = false;
        two.jobs = 3;
        SoundnessReport a = check_sound(dpn, one, gateway());
        SoundnessReport b = check_sound(dpn, two, gateway());
        CHECK(a.sound == b.sound);
        CHECK(a.violated == b.violated);
        REQUIRE(a.violations.size() == b.violations.size());
        for (std::size_t i = 0; i < a.violations.size(); ++i)
            CHECK(a.violations[i].node == b.violations[i].node);
    }
}

TEST_CASE("exploration order does not change verdicts")
{
    for (const char* name : {"auction", "auction_reset", "auction_thresh", "sound_trivial"}) {
        CAPTURE(name);
        Dpn dpn = model(name);
        CheckConfig dfs;
        dfs.order = ExplorationOrder::Dfs;
        SoundnessReport a = check_sound(dpn, {}, gateway());
        SoundnessReport b = check_sound(dpn, dfs, gateway());
        CHECK(a.violated == b.violated);
        CHECK(a.cg_size == b.cg_size);
    }
}

TEST_CASE("inconclusive outcomes")
{
    Dpn dpn = model("auction");
    CheckConfig tight;
    tight.budget = 3;
    SoundnessReport r = check_sound(dpn, tight, gateway());
    CHECK_FALSE(r.sound.has_value());
    CHECK_FALSE(r.violated);
    CHECK(r.error.find("exceeds") != std::string::npos);

    SolverConfig broken;
    broken.executable = testing::fixture_path("fake_solver.sh").string();
    SmtGateway gw(broken);
    CHECK_THROWS_AS(check_sound(dpn, {}, gw), SolverFailure);

    SolverConfig missing;
    missing.executable = "/nonexistent/solver";
    CHECK_THROWS_AS(
        [&] {
            SmtGateway none(missing);
            return check_sound(dpn, {}, none);
        }(),
        SolverUnavailable);
}

TEST_CASE("token bound")
{
    Dpn dpn = parse_pnml(
        R"(<pnml><net id="b"><place id="p"><initialMarking><text>1</text></initialMarking></place><place id="q"/>)"
        R"(<transition id="split"/><transition id="join"/>)"
        R"(<arc source="p" target="split"/><arc source="split" target="q"><inscription><text>2</text></inscription></arc>)"
        R"(<arc source="q" target="join"><inscription><text>2</text></inscription></arc><arc source="join" target="p"/>)"
        R"(<finalmarkings><marking><place idref="p"><text>1</text></place></marking></finalmarkings></net></pnml>)");
    CHECK_THROWS_AS(check_sound(dpn, {}, gateway()), BoundExceeded);
    CheckConfig two;
    two.bound = 2;
    CHECK(check_sound(dpn, two, gateway()).sound.has_value());
}
