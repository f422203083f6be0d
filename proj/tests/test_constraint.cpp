#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpnsound/errors.hpp"
#include "dpnsound/guard_parser.hpp"

#include <random>

using namespace dpnsound;

namespace {

const Var o{"o", Sort::Rat};
const Var t{"t", Sort::Rat};
const std::map<std::string, Sort> auction_vars{{"o", Sort::Rat}, {"t", Sort::Rat}};
const std::map<std::string, Sort> fines_vars{{"t", Sort::Int}, {"a", Sort::Int}, {"e", Sort::Int},
                                             {"d", Sort::Int}, {"p", Sort::Int}};

Rational q(const char* s) { return parse_rational(s); }

} // namespace

TEST_CASE("evaluate")
{
    SUBCASE("road-fines credit check")
    {
        Constraint c = parse_guard("t >= a + e", fines_vars);
        Assignment a;
        a.set(Var{"t", Sort::Int}.read(), Rational(10));
        a.set(Var{"a", Sort::Int}.read(), Rational(7));
        a.set(Var{"e", Sort::Int}.read(), Rational(0));
        CHECK(evaluate(c, a));
        a.set(Var{"e", Sort::Int}.read(), Rational(4));
        CHECK_FALSE(evaluate(c, a));
    }
    SUBCASE("identity and strict boundary")
    {
        Assignment a;
        a.set(o, Rational(0));
        CHECK(evaluate(Constraint::atom(o, Op::Eq, o), a));
        CHECK_FALSE(evaluate(Constraint::atom(o, Op::Gt, 0), a));
        CHECK(evaluate(Constraint::atom(o, Op::Ge, 0), a));
    }
    SUBCASE("missing variable")
    {
        CHECK_THROWS_AS(evaluate(Constraint::atom(o, Op::Gt, 0), Assignment{}), UnboundVariable);
    }
    SUBCASE("exact thirds")
    {
        LinTerm sum;
        for (int i = 0; i < 3; ++i)
            sum += LinTerm(o) * q("1/3");
        Assignment a;
        a.set(o, Rational(1));
        CHECK(evaluate(Constraint::atom(sum, Op::Eq, 1), a));
    }
    SUBCASE("compositional")
    {
        std::mt19937 rng(7);
        std::uniform_int_distribution<int> val(-3, 3);
        for (int i = 0; i < 200; ++i) {
            Constraint c1 = Constraint::atom(LinTerm(o) * Rational(val(rng)), Op::Le, LinTerm(t) + Rational(val(rng)));
            Constraint c2 = Constraint::atom(o, Op::Ne, Rational(val(rng)));
            Assignment a;
            a.set(o, Rational(val(rng)));
            a.set(t, Rational(val(rng), 2));
            bool e1 = evaluate(c1, a), e2 = evaluate(c2, a);
            CHECK(evaluate(c1 && c2, a) == (e1 && e2));
            CHECK(evaluate(c1 || c2, a) == (e1 || e2));
            CHECK(evaluate(!c1, a) == !e1);
        }
    }
}

TEST_CASE("sorts")
{
    CHECK(parse_sort("int") == Sort::Int);
    CHECK(parse_sort("real") == Sort::Rat);
    CHECK(parse_sort("boolean") == Sort::Bool);
    CHECK_FALSE(parse_sort("string"));
    Assignment a;
    CHECK_THROWS_AS(a.set(Var{"x", Sort::Int}, q("1/2")), SortMismatch);
    CHECK_THROWS_AS(a.set(Var{"b", Sort::Bool}, Rational(1)), SortMismatch);
    CHECK_THROWS_AS(LinTerm(Var{"b", Sort::Bool}), SortMismatch);
    CHECK(LinTerm(Var{"x", Sort::Int}).sort() == Sort::Int);
    CHECK((LinTerm(Var{"x", Sort::Int}) * q("1/2")).sort() == Sort::Rat);
}

TEST_CASE("rename")
{
    Constraint phi = Constraint::atom(t, Op::Gt, 0) && Constraint::atom(o, Op::Eq, 0);
    SUBCASE("to fresh copies")
    {
        Substitution sub;
        sub.emplace(t, t.copy("u"));
        sub.emplace(o, o.copy("u"));
        Constraint r = rename(phi, sub);
        CHECK(r == (Constraint::atom(t.copy("u"), Op::Gt, 0) && Constraint::atom(o.copy("u"), Op::Eq, 0)));
        Substitution back;
        back.emplace(t.copy("u"), t);
        back.emplace(o.copy("u"), o);
        CHECK(rename(r, back) == phi);
    }
    SUBCASE("empty map") { CHECK(rename(phi, {}) == phi); }
    SUBCASE("read to placeholder")
    {
        Substitution sub;
        sub.emplace(o.read(), o.placeholder());
        CHECK(to_string(rename(Constraint::atom(o.read(), Op::Gt, 0), sub)) == "o_0 > 0");
    }
    SUBCASE("to a term")
    {
        Substitution sub;
        sub.emplace(o, LinTerm(t) + Rational(1));
        Assignment a;
        a.set(t, Rational(-1));
        CHECK(evaluate(rename(Constraint::atom(o, Op::Eq, 0), sub), a));
    }
    SUBCASE("sort mismatch")
    {
        Substitution sub;
        sub.emplace(o, Var{"b", Sort::Bool});
        CHECK_THROWS_AS(rename(Constraint::atom(o, Op::Gt, 0), sub), SortMismatch);
    }
    SUBCASE("capture")
    {
        Constraint ex = Constraint::exists({o}, Constraint::atom(o, Op::Gt, t));
        Substitution sub;
        sub.emplace(t, o);
        CHECK_THROWS_AS(rename(ex, sub), CaptureError);
    }
}

TEST_CASE("transition formula and read/write sets")
{
    std::vector<Var> vars{o, t};
    Constraint bid = parse_guard("t > 0 && o' > o", auction_vars);
    SUBCASE("bid")
    {
        Constraint expected = Constraint::atom(t.read(), Op::Gt, 0) && Constraint::atom(o.written(), Op::Gt, o.read())
                              && Constraint::atom(t.written(), Op::Eq, t.read());
        CHECK(canonical(transition_formula(bid, vars)) == canonical(expected));
        CHECK(read_vars(bid) == std::set<Var>{o, t});
        CHECK(write_vars(bid) == std::set<Var>{o});
    }
    SUBCASE("true guard")
    {
        Constraint expected =
            Constraint::atom(o.written(), Op::Eq, o.read()) && Constraint::atom(t.written(), Op::Eq, t.read());
        CHECK(canonical(transition_formula(Constraint::truth(), vars)) == canonical(expected));
        CHECK(read_vars(Constraint::truth()).empty());
        CHECK(write_vars(Constraint::truth()).empty());
    }
    SUBCASE("hammer")
    {
        Constraint hammer = parse_guard("t <= 0 && o > 0", auction_vars);
        CHECK(write_vars(hammer).empty());
        Constraint expected = hammer && Constraint::atom(o.written(), Op::Eq, o.read())
                              && Constraint::atom(t.written(), Op::Eq, t.read());
        CHECK(canonical(transition_formula(hammer, vars)) == canonical(expected));
    }
    SUBCASE("add penalty")
    {
        Constraint g = parse_guard("a' >= 0", {{"a", Sort::Int}});
        CHECK(read_vars(g).empty());
        CHECK(write_vars(g) == std::set<Var>{Var{"a", Sort::Int}});
    }
    SUBCASE("frame holds under any satisfying assignment")
    {
        Constraint delta = transition_formula(bid, vars);
        for (int tr = -2; tr <= 2; ++tr)
            for (int tw = -2; tw <= 2; ++tw) {
                Assignment a;
                a.set(o.read(), Rational(0));
                a.set(o.written(), Rational(1));
                a.set(t.read(), Rational(tr));
                a.set(t.written(), Rational(tw));
                if (evaluate(delta, a))
                    CHECK(tr == tw);
            }
    }
    SUBCASE("boolean frame")
    {
        Var b{"b", Sort::Bool};
        Constraint delta = transition_formula(Constraint::truth(), {b});
        for (bool r : {false, true})
            for (bool w : {false, true}) {
                Assignment a;
                a.set(b.read(), r);
                a.set(b.written(), w);
                CHECK(evaluate(delta, a) == (r == w));
            }
    }
}

TEST_CASE("smart constructors")
{
    CHECK((Constraint::truth() && Constraint::atom(o, Op::Gt, 0)) == Constraint::atom(o, Op::Gt, 0));
    CHECK((Constraint::falsity() && Constraint::atom(o, Op::Gt, 0)).is_false());
    CHECK((Constraint::truth() || Constraint::atom(o, Op::Gt, 0)).is_true());
    CHECK(Constraint::atom(1, Op::Lt, 2).is_true());
    CHECK(Constraint::atom(o, Op::Lt, o).is_false());
    CHECK(to_string(!(Constraint::atom(o, Op::Gt, 0) && Constraint::atom(t, Op::Le, 1))) == "o <= 0 || t > 1");
    CHECK(Constraint::exists({o}, Constraint::atom(t, Op::Gt, 0)) == Constraint::atom(t, Op::Gt, 0));
}

TEST_CASE("canonical")
{
    Constraint a = Constraint::atom(o, Op::Gt, 0) && Constraint::atom(t, Op::Gt, 0);
    Constraint b = Constraint::atom(t, Op::Gt, 0) && Constraint::atom(o, Op::Gt, 0) && Constraint::atom(0, Op::Lt, o);
    CHECK(canonical(a) == canonical(b));
    CHECK(canonical(Constraint::atom(LinTerm(o) * Rational(2), Op::Le, 4)) == canonical(Constraint::atom(o, Op::Le, 2)));
    CHECK(canonical(Constraint::atom(o, Op::Ge, t)) == canonical(Constraint::atom(t, Op::Le, o)));
    CHECK(canonical(Constraint::atom(o.read(), Op::Gt, 0)) != canonical(Constraint::atom(o.written(), Op::Gt, 0)));
}

TEST_CASE("guard parser")
{
    SUBCASE("annotations")
    {
        Constraint g = parse_guard("t > 0 && o' > o", auction_vars);
        CHECK(free_vars(g) == std::set<Var>{o.read(), o.written(), t.read()});
        CHECK(to_guard_text(g) == "t > 0 && o' > o");
    }
    SUBCASE("empty guard is true") { CHECK(parse_guard("  ", auction_vars).is_true()); }
    SUBCASE("disjunction and parentheses")
    {
        Constraint g = parse_guard("d != 0 || (p == 0 && t >= a)", fines_vars);
        Assignment a;
        for (const char* v : {"d", "p", "t", "a"})
            a.set(Var{v, Sort::Int}.read(), Rational(0));
        CHECK(evaluate(g, a));
        a.set(Var{"t", Sort::Int}.read(), Rational(-1));
        CHECK_FALSE(evaluate(g, a));
    }
    SUBCASE("literals")
    {
        Constraint g = parse_guard("o' = 1/2 && t' >= -2.25 && 3 * t < 2 * o - 1", auction_vars);
        Assignment a;
        a.set(o.written(), q("1/2"));
        a.set(t.written(), q("-9/4"));
        a.set(o.read(), Rational(2));
        a.set(t.read(), Rational(0));
        CHECK(evaluate(g, a));
    }
    SUBCASE("booleans")
    {
        std::map<std::string, Sort> decl{{"ok", Sort::Bool}, {"x", Sort::Int}};
        Constraint g = parse_guard("!ok && (ok' || x' > 0)", decl);
        CHECK(write_vars(g) == std::set<Var>{Var{"ok", Sort::Bool}, Var{"x", Sort::Int}});
    }
    SUBCASE("errors carry positions")
    {
        try {
            parse_guard("t > 0 && && o > 1", auction_vars);
            FAIL("expected a parse error");
        } catch (const GuardParseError& e) {
            CHECK(e.position() == 9);
        }
        CHECK_THROWS_AS(parse_guard("t > ", auction_vars), GuardParseError);
        CHECK_THROWS_AS(parse_guard("o * t > 0", auction_vars), GuardParseError);
        CHECK_THROWS_AS(parse_guard("0 < t < 1", auction_vars), GuardParseError);
        CHECK_THROWS_AS(parse_guard("z > 0", auction_vars), UndeclaredVariable);
        CHECK_THROWS_AS(parse_formula("o' > 0", auction_vars), GuardParseError);
    }
    SUBCASE("round trip through text")
    {
        Constraint g = parse_guard("d != 0 || (p == 0 && t >= a)", fines_vars);
        CHECK(canonical(parse_guard(to_guard_text(g), fines_vars)) == canonical(g));
        Constraint h = parse_guard("t > 0 && t' < t", auction_vars);
        CHECK(canonical(parse_guard(to_guard_text(h), auction_vars)) == canonical(h));
    }
}
