#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "dpnsound/errors.hpp"
#include "dpnsound/oracle.hpp"

#include <random>

using namespace dpnsound;
using testing::auction_formula;
using testing::gateway;

namespace {

const Var o{"o", Sort::Rat};
const Var t{"t", Sort::Rat};
const Var x{"x", Sort::Int};

Constraint f(const std::string& text) { return auction_formula(text); }

SolverConfig fake(const std::string& mode, std::chrono::milliseconds timeout = std::chrono::milliseconds(10000))
{
    SolverConfig c;
    c.executable = testing::fixture_path("fake_solver.sh").string();
    c.args = {mode};
    c.timeout = timeout;
    return c;
}

} // namespace

TEST_CASE("s-expressions")
{
    auto es = parse_sexprs("(a (b |c d| \"s\") ; comment\n e) f");
    REQUIRE(es.size() == 2);
    CHECK(es[0].head() == "a");
    CHECK(es[0].list[1].list[1].atom == "c d");
    CHECK(es[1].atom == "f");
    CHECK_THROWS(parse_sexprs("(a"));
}

TEST_CASE("SMT-LIB rendering round trip")
{
    // parsed symbols lose their |quotes|
    auto bare = [](const Var& v) { return parse_sexprs(smt_symbol(v))[0].atom; };
    std::map<std::string, Var> symbols{{bare(o), o}, {bare(t), t}, {bare(o.placeholder()), o.placeholder()}};
    for (const char* text : {"o > 0 && t <= o0 + 1/2", "o != 0 || t = 2 * t0", "!(o >= 1) && t < -3"}) {
        Constraint c = f(text);
        auto parsed = parse_sexprs(to_smtlib(c));
        REQUIRE(parsed.size() == 1);
        std::map<std::string, Var> syms = symbols;
        syms.emplace(bare(t.placeholder()), t.placeholder());
        CHECK(canonical(from_smtlib(parsed[0], syms)) == canonical(c));
    }
    CHECK_THROWS_AS(from_smtlib(parse_sexprs("(exists ((y Int)) (> y 0))")[0], {}), QENotSupported);
    CHECK_THROWS_AS(from_smtlib(parse_sexprs("(> (* |o| |t|) 0)")[0], symbols), QENotSupported);
}

TEST_CASE("is_sat")
{
    SUBCASE("blocked formula model")
    {
        SatResult r = gateway().is_sat(f("o0 = 0 && t0 <= 0"));
        REQUIRE(r.sat());
        CHECK(r.model.number(o.placeholder()) == 0);
        CHECK(evaluate(f("o0 = 0 && t0 <= 0"), r.model));
    }
    SUBCASE("trivial answers")
    {
        CHECK(gateway().is_sat(Constraint::falsity()).unsat());
        CHECK(gateway().is_sat(Constraint::atom(x, Op::Gt, 0) && Constraint::atom(x, Op::Lt, 0)).unsat());
        CHECK(gateway().is_sat(Constraint::atom(x, Op::Gt, 0) && Constraint::atom(x, Op::Lt, 1)).unsat());
        CHECK(gateway().is_sat(Constraint::atom(o, Op::Gt, 0) && Constraint::atom(o, Op::Lt, 1)).sat());
    }
    SUBCASE("models satisfy random queries")
    {
        std::mt19937 rng(11);
        std::uniform_int_distribution<int> k(-3, 3);
        int sat = 0;
        for (int i = 0; i < 60; ++i) {
            Constraint c = Constraint::atom(LinTerm(o) * Rational(k(rng)) + LinTerm(t) * Rational(k(rng)), Op::Le, k(rng))
                           && Constraint::atom(LinTerm(o) - LinTerm(x) * Rational(k(rng)), Op::Gt, k(rng))
                           && (Constraint::atom(t, Op::Ne, k(rng)) || Constraint::atom(x, Op::Ge, k(rng)));
            SatResult r = gateway().is_sat(c);
            REQUIRE_FALSE(r.unknown());
            if (r.sat()) {
                ++sat;
                CHECK(evaluate(c, r.model));
            }
        }
        CHECK(sat > 0);
    }
    SUBCASE("booleans")
    {
        Var b{"b", Sort::Bool};
        Constraint c = Constraint::bool_var(b) && (!Constraint::bool_var(b) || Constraint::atom(x, Op::Eq, 2));
        SatResult r = gateway().is_sat(c);
        REQUIRE(r.sat());
        CHECK(r.model.boolean(b));
        CHECK(r.model.number(x) == 2);
    }
}

TEST_CASE("qe")
{
    SUBCASE("bid update")
    {
        Var ou = o.copy("u"), tu = t.copy("u");
        Constraint body = Constraint::atom(tu, Op::Gt, 0) && Constraint::atom(ou, Op::Eq, 0)
                          && Constraint::atom(o, Op::Gt, ou) && Constraint::atom(t, Op::Eq, tu);
        Constraint r = gateway().qe({ou, tu}, body);
        CHECK(gateway().equivalent(r, f("t > 0 && o > 0")));
        CHECK(to_string(gateway().simplify(r)) == "o > 0 && t > 0");
    }
    SUBCASE("vacuous quantifier")
    {
        Constraint c = f("o > t");
        CHECK(gateway().equivalent(gateway().qe({x}, c), c));
    }
    SUBCASE("interval projection")
    {
        Constraint r = gateway().qe({t}, f("t > o && t < 2 * o + 1"));
        CHECK(gateway().equivalent(r, f("o > -1")));
    }
    SUBCASE("final formulas against explicit reachability")
    {
        // the three final-state formulas of CG(p12) as computed, and an explicit oracle
        Constraint phi1 = f("o = o0 && o0 > 0 && t = t0 && t0 <= 0");
        Constraint phi2 = f("o = o0 && o0 > 0 && t < t0 && t <= 0 && t0 > 0");
        Constraint phi3 = f("o > o0 && o > 0 && t < t0 && t <= 0 && t0 > 0");
        Constraint psi = gateway().qe({o, t}, phi1 || phi2 || phi3);
        CHECK(free_vars(psi) == std::set<Var>{o.placeholder(), t.placeholder()});

        Dpn dpn = testing::model("auction");
        DomainBox box = DomainBox::parse("rat=-3,-2,-1,0,1,2,3", dpn);
        for (int o0 = -2; o0 <= 2; ++o0) {
            for (int t0 = -2; t0 <= 2; ++t0) {
                DpnState start;
                start.marking.set("p1", 1);
                start.marking.set("p2", 1);
                start.assignment.set(o, Rational(o0));
                start.assignment.set(t, Rational(t0));
                ExplicitGraph g = enumerate_state_space(dpn, box, 1, start);
                bool reaches = coreachable(g, dpn.final_marking)[0];
                Assignment a;
                a.set(o.placeholder(), Rational(o0));
                a.set(t.placeholder(), Rational(t0));
                CAPTURE(o0);
                CAPTURE(t0);
                CHECK(evaluate(psi, a) == reaches);
            }
        }
        CHECK(gateway().equivalent(psi, f("o0 > 0 || t0 > 0")));
    }
    SUBCASE("sampled soundness")
    {
        std::mt19937 rng(5);
        std::uniform_int_distribution<int> k(-2, 2);
        Var y{"y", Sort::Int}, z{"z", Sort::Int};
        for (int round = 0; round < 5; ++round) {
            Constraint c = Constraint::atom(LinTerm(x) * Rational(k(rng)) + LinTerm(y), Op::Le, LinTerm(z) + Rational(k(rng)))
                           && Constraint::atom(x, Op::Ge, LinTerm(y) * Rational(k(rng)) + Rational(k(rng)))
                           && Constraint::atom(x, Op::Le, 3);
            Constraint psi = gateway().qe({x}, c);
            for (int i = 0; i < 20; ++i) {
                Assignment a;
                a.set(y, Rational(k(rng) * 2));
                a.set(z, Rational(k(rng) * 2));
                Constraint bound = Constraint::atom(y, Op::Eq, a.number(y)) && Constraint::atom(z, Op::Eq, a.number(z));
                CHECK(evaluate(psi, a) == gateway().is_sat(c && bound).sat());
            }
        }
    }
}

TEST_CASE("equivalent")
{
    CHECK(gateway().equivalent(f("t > 0 && o > 0"), f("o > 0 && t > 0")));
    CHECK_FALSE(gateway().equivalent(f("o = 0"), f("o = 0 && t > 0")));
    CHECK(gateway().equivalent(Constraint::atom(x, Op::Ge, 1), Constraint::atom(x, Op::Gt, 0)));
    CHECK_FALSE(gateway().equivalent(f("o >= 1"), f("o > 0")));
    // symmetric and transitive on a small chain
    Constraint a = f("o > 0 && o < 2"), b = f("0 < o && 2 > o"), c = f("!(o <= 0 || o >= 2)");
    CHECK(gateway().equivalent(a, b));
    CHECK(gateway().equivalent(b, a));
    CHECK(gateway().equivalent(b, c));
    CHECK(gateway().equivalent(a, c));
}

TEST_CASE("simplify")
{
    CHECK(gateway().simplify(Constraint::truth() && f("o > 0")) == f("o > 0"));
    CHECK(gateway().equivalent(gateway().simplify(f("o > 0 && o > 1")), f("o > 1")));
    CHECK(to_string(gateway().simplify(f("o > 0 && o > 1"))) == "o > 1");
    CHECK(gateway().simplify(f("o >= 1 && o <= 1")) == gateway().simplify(f("o = 1")));
    CHECK(gateway().simplify(f("o > 1 || o <= 1")).is_true());
    CHECK(gateway().simplify(f("o > 1 && o < 0")).is_false());
}

TEST_CASE("cache transparency")
{
    SolverConfig uncached = SolverConfig::from_environment();
    uncached.cache = false;
    SmtGateway plain(uncached);
    SmtGateway cached(SolverConfig::from_environment());
    std::vector<Constraint> queries{f("o > 0 && t > 0"), f("o > 0 && o < 0"), f("o0 = 0 && t0 <= 0"), f("o > 0 && t > 0")};
    for (const auto& q : queries) {
        auto a = plain.is_sat(q), b = cached.is_sat(q);
        CHECK(a.status == b.status);
        CHECK(a.model == b.model);
    }
    CHECK(cached.stats().cache_hits == 1);
    CHECK(plain.stats().cache_hits == 0);
    CHECK(plain.stats().sat_checks == 4);
    CHECK(canonical(plain.qe({t}, f("t > o && t < 1"))) == canonical(cached.qe({t}, f("t > o && t < 1"))));
}

TEST_CASE("solver failures")
{
    SUBCASE("missing executable")
    {
        SolverConfig c;
        c.executable = "/nonexistent/solver";
        CHECK_THROWS_AS(SmtGateway(c).is_sat(f("o > 0")), SolverUnavailable);
    }
    SUBCASE("unknown is reported, never coerced")
    {
        SmtGateway gw(fake("unknown"));
        SatResult r = gw.is_sat(f("o > 0"));
        CHECK(r.unknown());
        CHECK_THROWS_AS(gw.equivalent(f("o > 0"), f("o >= 1")), Inconclusive);
    }
    SUBCASE("timeout gives unknown and a fresh session")
    {
        SmtGateway gw(fake("hang", std::chrono::milliseconds(100)));
        SatResult r = gw.is_sat(f("o > 0"));
        CHECK(r.unknown());
        CHECK(r.reason.find("timeout") != std::string::npos);
        CHECK(gw.is_sat(f("o > 1")).unknown());
    }
}
