#include "dpnsound/errors.hpp"
#include "dpnsound/smt.hpp"

#include <cctype>
#include <sstream>

namespace dpnsound {

// ---------------------------------------------------------------------------
// S-expressions

std::string SExpr::str() const
{
    if (is_atom)
        return atom;
    std::string out = "(";
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i > 0)
            out += ' ';
        out += list[i].str();
    }
    return out + ")";
}

namespace {

class SExprReader {
public:
    explicit SExprReader(std::string_view text) : text_(text) {}

    bool at_end()
    {
        skip();
        return pos_ >= text_.size();
    }

    SExpr read()
    {
        skip();
        if (pos_ >= text_.size())
            throw SolverFailure("unexpected end of solver output");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            SExpr e;
            e.is_atom = false;
            for (;;) {
                skip();
                if (pos_ >= text_.size())
                    throw SolverFailure("unbalanced parenthesis in solver output");
                if (text_[pos_] == ')') {
                    ++pos_;
                    return e;
                }
                e.list.push_back(read());
            }
        }
        if (c == ')')
            throw SolverFailure("unexpected ')' in solver output");
        if (c == '|') {
            std::size_t end = text_.find('|', pos_ + 1);
            if (end == std::string_view::npos)
                throw SolverFailure("unterminated quoted symbol in solver output");
            SExpr e;
            e.atom = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            return e;
        }
        if (c == '"') {
            std::size_t end = pos_ + 1;
            while (end < text_.size()) {
                if (text_[end] == '"') {
                    if (end + 1 < text_.size() && text_[end + 1] == '"') {
                        end += 2;
                        continue;
                    }
                    break;
                }
                ++end;
            }
            SExpr e;
            e.atom = std::string(text_.substr(pos_, end + 1 - pos_));
            pos_ = end + 1;
            return e;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '('
               && text_[pos_] != ')')
            ++pos_;
        SExpr e;
        e.atom = std::string(text_.substr(start, pos_ - start));
        return e;
    }

private:
    void skip()
    {
        while (pos_ < text_.size()) {
            if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            } else if (text_[pos_] == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<SExpr> parse_sexprs(std::string_view text)
{
    SExprReader reader(text);
    std::vector<SExpr> out;
    while (!reader.at_end())
        out.push_back(reader.read());
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string smt_symbol(const Var& var)
{
    static constexpr const char* tags[] = {"", "^r", "^w", "^0"};
    return "|" + var.name + tags[static_cast<int>(var.annotation)] + "|";
}

std::string smt_sort(Sort sort)
{
    switch (sort) {
    case Sort::Bool:
        return "Bool";
    case Sort::Int:
        return "Int";
    case Sort::Rat:
        return "Real";
    }
    return "Real";
}

namespace {

std::string numeral(const Rational& value, bool real)
{
    Rational mag = value < 0 ? Rational(-value) : value;
    std::string body;
    if (is_integral(mag)) {
        body = boost::multiprecision::numerator(mag).str();
        if (real)
            body += ".0";
    } else {
        body = "(/ " + boost::multiprecision::numerator(mag).str() + ".0 "
               + boost::multiprecision::denominator(mag).str() + ".0)";
    }
    return value < 0 ? "(- " + body + ")" : body;
}

bool term_is_real(const LinTerm& t)
{
    return t.sort() == Sort::Rat;
}

std::string render_term(const LinTerm& t, bool real)
{
    std::vector<std::string> parts;
    for (const auto& [v, k] : t.coefficients()) {
        std::string sym = smt_symbol(v);
        if (real && v.sort == Sort::Int)
            sym = "(to_real " + sym + ")";
        if (k == 1)
            parts.push_back(sym);
        else
            parts.push_back("(* " + numeral(k, real) + " " + sym + ")");
    }
    if (t.constant() != 0 || parts.empty())
        parts.push_back(numeral(t.constant(), real));
    if (parts.size() == 1)
        return parts.front();
    std::string out = "(+";
    for (const auto& p : parts)
        out += " " + p;
    return out + ")";
}

void render(const Constraint& c, std::string& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolConstNode>) {
                out += n.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, BoolVarNode>) {
                out += smt_symbol(n.var);
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                bool real = term_is_real(n.lhs) || term_is_real(n.rhs);
                std::string l = render_term(n.lhs, real);
                std::string r = render_term(n.rhs, real);
                switch (n.op) {
                case Op::Eq:
                    out += "(= " + l + " " + r + ")";
                    break;
                case Op::Ne:
                    out += "(not (= " + l + " " + r + "))";
                    break;
                default:
                    out += "(" + std::string(symbol(n.op)) + " " + l + " " + r + ")";
                }
            } else if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                out += std::is_same_v<T, AndNode> ? "(and" : "(or";
                for (const auto& ch : n.children) {
                    out += ' ';
                    render(ch, out);
                }
                out += ')';
            } else if constexpr (std::is_same_v<T, NotNode>) {
                out += "(not ";
                render(n.child, out);
                out += ')';
            } else {
                out += "(exists (";
                for (const auto& v : n.vars)
                    out += "(" + smt_symbol(v) + " " + smt_sort(v.sort) + ")";
                out += ") ";
                render(n.body, out);
                out += ')';
            }
        },
        c.node().value);
}

} // namespace

std::string to_smtlib(const Constraint& c)
{
    std::string out;
    render(c, out);
    return out;
}

// ---------------------------------------------------------------------------
// Reading formulas back

namespace {

using Env = std::map<std::string, SExpr>;

SExpr expand_lets(const SExpr& e, const Env& env)
{
    if (e.is_atom) {
        auto it = env.find(e.atom);
        return it == env.end() ? e : it->second;
    }
    if (e.head() == "let" && e.list.size() == 3 && !e.list[1].is_atom) {
        Env inner = env;
        for (const auto& binding : e.list[1].list) {
            if (binding.is_atom || binding.list.size() != 2 || !binding.list[0].is_atom)
                throw SolverFailure("malformed let binding: " + binding.str());
            inner[binding.list[0].atom] = expand_lets(binding.list[1], env);
        }
        return expand_lets(e.list[2], inner);
    }
    SExpr out;
    out.is_atom = false;
    out.list.reserve(e.list.size());
    for (const auto& ch : e.list)
        out.list.push_back(expand_lets(ch, env));
    return out;
}

bool is_number(const std::string& s)
{
    return !s.empty() && std::isdigit(static_cast<unsigned char>(s.front()));
}

class Reader {
public:
    explicit Reader(const std::map<std::string, Var>& symbols) : symbols_(symbols) {}

    bool is_bool(const SExpr& e) const
    {
        if (e.is_atom) {
            if (e.atom == "true" || e.atom == "false")
                return true;
            auto it = symbols_.find(e.atom);
            return it != symbols_.end() && it->second.sort == Sort::Bool;
        }
        auto h = e.head();
        if (h == "and" || h == "or" || h == "not" || h == "=>" || h == "xor" || h == "=" || h == "distinct"
            || h == "<=" || h == "<" || h == ">=" || h == ">" || h == "exists" || h == "forall")
            return true;
        if (h == "ite" && e.list.size() == 4)
            return is_bool(e.list[2]);
        return false;
    }

    Constraint formula(const SExpr& e) const
    {
        if (e.is_atom) {
            if (e.atom == "true")
                return Constraint::truth();
            if (e.atom == "false")
                return Constraint::falsity();
            const Var& v = lookup(e.atom);
            if (v.sort != Sort::Bool)
                throw SolverFailure("numeric symbol used as formula: " + e.atom);
            return Constraint::bool_var(v);
        }
        if (!e.list.empty() && !e.list.front().is_atom)
            throw QENotSupported("indexed operator in solver result: " + e.str()); // (_ divisible k)
        auto h = e.head();
        std::vector<SExpr> args(e.list.begin() + (e.list.empty() ? 0 : 1), e.list.end());
        if (h == "and" || h == "or") {
            std::vector<Constraint> parts;
            for (const auto& a : args)
                parts.push_back(formula(a));
            return h == "and" ? Constraint::conj(std::move(parts)) : Constraint::disj(std::move(parts));
        }
        if (h == "not" && args.size() == 1)
            return Constraint::negation(formula(args[0]));
        if (h == "=>" && args.size() >= 2) {
            // right associative
            Constraint acc = formula(args.back());
            for (std::size_t i = args.size() - 1; i-- > 0;)
                acc = !formula(args[i]) || acc;
            return acc;
        }
        if (h == "xor" && args.size() == 2) {
            Constraint a = formula(args[0]);
            Constraint b = formula(args[1]);
            return (a && !b) || (!a && b);
        }
        if (h == "ite" && args.size() == 3) {
            if (!is_bool(args[1]))
                throw QENotSupported("term-level ite in solver result");
            Constraint c = formula(args[0]);
            return (c && formula(args[1])) || (!c && formula(args[2]));
        }
        if (h == "exists" || h == "forall")
            throw QENotSupported("solver result still contains a quantifier");
        if ((h == "=" || h == "distinct") && args.size() >= 2 && is_bool(args[0])) {
            std::vector<Constraint> parts;
            for (std::size_t i = 0; i + 1 < args.size(); ++i) {
                for (std::size_t j = i + 1; j < args.size(); ++j) {
                    if (h == "=" && j != i + 1)
                        continue;
                    Constraint a = formula(args[i]);
                    Constraint b = formula(args[j]);
                    Constraint same = (a && b) || (!a && !b);
                    parts.push_back(h == "=" ? same : !same);
                }
            }
            return Constraint::conj(std::move(parts));
        }
        Op op;
        if (h == "=")
            op = Op::Eq;
        else if (h == "<=")
            op = Op::Le;
        else if (h == "<")
            op = Op::Lt;
        else if (h == ">=")
            op = Op::Ge;
        else if (h == ">")
            op = Op::Gt;
        else if (h == "distinct")
            op = Op::Ne;
        else
            throw SolverFailure("unsupported operator in solver result: " + e.str());
        if (args.size() < 2)
            throw SolverFailure("comparison with fewer than two operands: " + e.str());
        std::vector<LinTerm> terms;
        for (const auto& a : args)
            terms.push_back(term(a));
        std::vector<Constraint> parts;
        if (op == Op::Ne) {
            for (std::size_t i = 0; i < terms.size(); ++i)
                for (std::size_t j = i + 1; j < terms.size(); ++j)
                    parts.push_back(Constraint::atom(terms[i], op, terms[j]));
        } else {
            for (std::size_t i = 0; i + 1 < terms.size(); ++i)
                parts.push_back(Constraint::atom(terms[i], op, terms[i + 1]));
        }
        return Constraint::conj(std::move(parts));
    }

    LinTerm term(const SExpr& e) const
    {
        if (e.is_atom) {
            if (is_number(e.atom)) {
                try {
                    return parse_rational(e.atom);
                } catch (const std::invalid_argument&) {
                    throw SolverFailure("unreadable numeral in solver result: " + e.atom);
                }
            }
            const Var& v = lookup(e.atom);
            if (v.sort == Sort::Bool)
                throw SolverFailure("boolean symbol used as term: " + e.atom);
            return LinTerm(v);
        }
        auto h = e.head();
        std::vector<SExpr> args(e.list.begin() + (e.list.empty() ? 0 : 1), e.list.end());
        if (h == "+") {
            LinTerm sum;
            for (const auto& a : args)
                sum += term(a);
            return sum;
        }
        if (h == "-" && args.size() == 1)
            return -term(args[0]);
        if (h == "-" && args.size() >= 2) {
            LinTerm acc = term(args[0]);
            for (std::size_t i = 1; i < args.size(); ++i)
                acc -= term(args[i]);
            return acc;
        }
        if (h == "*") {
            LinTerm acc(Rational(1));
            for (const auto& a : args) {
                LinTerm t = term(a);
                if (acc.is_constant())
                    acc = t * acc.constant();
                else if (t.is_constant())
                    acc *= t.constant();
                else
                    throw QENotSupported("non-linear product in solver result: " + e.str());
            }
            return acc;
        }
        if (h == "/" && args.size() == 2) {
            LinTerm num = term(args[0]);
            LinTerm den = term(args[1]);
            if (!den.is_constant() || den.constant() == 0)
                throw QENotSupported("non-constant division in solver result: " + e.str());
            return num * Rational(Rational(1) / den.constant());
        }
        if (h == "to_real" && args.size() == 1)
            return term(args[0]);
        if (h == "ite" || h == "mod" || h == "div" || h == "abs" || h == "to_int" || h == "divisible")
            throw QENotSupported("solver result uses '" + std::string(h) + "': " + e.str());
        throw SolverFailure("unsupported term in solver result: " + e.str());
    }

private:
    const Var& lookup(const std::string& name) const
    {
        auto it = symbols_.find(name);
        if (it == symbols_.end())
            throw SolverFailure("unknown symbol in solver result: " + name);
        return it->second;
    }

    const std::map<std::string, Var>& symbols_;
};

} // namespace

Constraint from_smtlib(const SExpr& e, const std::map<std::string, Var>& symbols)
{
    return Reader(symbols).formula(expand_lets(e, {}));
}

} // namespace dpnsound
