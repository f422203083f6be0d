#include "dpnsound/guard_parser.hpp"

#include "dpnsound/errors.hpp"

#include <cctype>
#include <optional>

namespace dpnsound {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Parser {
public:
    Parser(std::string_view text, const std::map<std::string, Sort>& declared, bool annotated)
        : text_(text), declared_(declared), annotated_(annotated)
    {
    }

    Constraint parse()
    {
        Constraint c = disjunction();
        skip();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return c;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw GuardParseError(pos_, message); }

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool peek(std::string_view token)
    {
        skip();
        return text_.substr(pos_, token.size()) == token;
    }

    bool accept(std::string_view token)
    {
        if (!peek(token))
            return false;
        pos_ += token.size();
        return true;
    }

    void expect(std::string_view token)
    {
        if (!accept(token))
            fail("expected '" + std::string(token) + "'");
    }

    std::optional<std::string> peek_identifier()
    {
        skip();
        if (pos_ >= text_.size() || !ident_start(text_[pos_]))
            return std::nullopt;
        std::size_t end = pos_;
        while (end < text_.size() && ident_char(text_[end]))
            ++end;
        return std::string(text_.substr(pos_, end - pos_));
    }

    std::optional<Op> peek_relop()
    {
        skip();
        static constexpr std::pair<std::string_view, Op> ops[] = {
            {"==", Op::Eq}, {"!=", Op::Ne}, {">=", Op::Ge}, {"<=", Op::Le}, {"=", Op::Eq}, {">", Op::Gt}, {"<", Op::Lt},
        };
        for (const auto& [tok, op] : ops)
            if (text_.substr(pos_, tok.size()) == tok)
                return op;
        return std::nullopt;
    }

    Op relop()
    {
        skip();
        static constexpr std::pair<std::string_view, Op> ops[] = {
            {"==", Op::Eq}, {"!=", Op::Ne}, {">=", Op::Ge}, {"<=", Op::Le}, {"=", Op::Eq}, {">", Op::Gt}, {"<", Op::Lt},
        };
        for (const auto& [tok, op] : ops) {
            if (text_.substr(pos_, tok.size()) == tok) {
                pos_ += tok.size();
                return op;
            }
        }
        fail("expected a comparison operator");
    }

    Constraint disjunction()
    {
        std::vector<Constraint> parts{conjunction()};
        while (accept("||"))
            parts.push_back(conjunction());
        return Constraint::disj(std::move(parts));
    }

    Constraint conjunction()
    {
        std::vector<Constraint> parts{unary()};
        while (accept("&&"))
            parts.push_back(unary());
        return Constraint::conj(std::move(parts));
    }

    Constraint unary()
    {
        skip();
        if (peek("!") && !peek("!="))
            return (++pos_, Constraint::negation(unary()));
        return primary();
    }

    Constraint primary()
    {
        skip();
        if (pos_ >= text_.size())
            fail("unexpected end of guard");

        if (text_[pos_] == '(') {
            // "(x + 1) > y" is a comparison, "(x > 1)" a parenthesized formula.
            std::size_t start = pos_;
            try {
                return comparison();
            } catch (const GuardParseError& arith) {
                GuardParseError arith_error = arith;
                pos_ = start;
                try {
                    expect("(");
                    Constraint c = disjunction();
                    expect(")");
                    return c;
                } catch (const GuardParseError& logic) {
                    // report whichever reading got further
                    if (arith_error.position() > logic.position())
                        throw arith_error;
                    throw;
                }
            }
        }

        if (auto id = peek_identifier()) {
            if (*id == "true" || *id == "false") {
                pos_ += id->size();
                return Constraint::constant(*id == "true");
            }
            auto it = declared_.find(*id);
            if (it != declared_.end() && it->second == Sort::Bool) {
                Var v = variable();
                if (peek_relop())
                    fail("boolean variable '" + v.name + "' compared arithmetically");
                return Constraint::bool_var(v);
            }
        }
        return comparison();
    }

    Constraint comparison()
    {
        LinTerm lhs = term();
        Op op = relop();
        LinTerm rhs = term();
        if (peek_relop())
            fail("chained comparisons are not allowed");
        return Constraint::atom(std::move(lhs), op, std::move(rhs));
    }

    LinTerm term()
    {
        LinTerm t = product();
        for (;;) {
            if (accept("+"))
                t += product();
            else if (accept("-"))
                t -= product();
            else
                return t;
        }
    }

    LinTerm product()
    {
        std::size_t start = pos_;
        LinTerm t = factor();
        while (accept("*")) {
            LinTerm rhs = factor();
            if (t.is_constant())
                t = rhs * t.constant();
            else if (rhs.is_constant())
                t *= rhs.constant();
            else {
                pos_ = start;
                fail("non-linear product: '*' needs a constant operand");
            }
        }
        return t;
    }

    LinTerm factor()
    {
        skip();
        if (pos_ >= text_.size())
            fail("unexpected end of guard");
        char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return -factor();
        }
        if (c == '(') {
            ++pos_;
            LinTerm t = term();
            expect(")");
            return t;
        }
        if (digit(c))
            return number();
        if (ident_start(c)) {
            Var v = variable();
            if (v.sort == Sort::Bool)
                fail("boolean variable '" + v.name + "' used in arithmetic");
            return LinTerm(v);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Rational number()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && digit(text_[pos_]))
            ++pos_;
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' && digit(text_[pos_ + 1])) {
            ++pos_;
            while (pos_ < text_.size() && digit(text_[pos_]))
                ++pos_;
        } else if (pos_ + 1 < text_.size() && text_[pos_] == '/' && digit(text_[pos_ + 1])) {
            ++pos_;
            while (pos_ < text_.size() && digit(text_[pos_]))
                ++pos_;
        }
        try {
            return parse_rational(text_.substr(start, pos_ - start));
        } catch (const std::invalid_argument& e) {
            pos_ = start;
            fail(e.what());
        }
    }

    Var variable()
    {
        std::string name = *peek_identifier();
        pos_ += name.size();
        bool written = false;
        if (pos_ < text_.size() && text_[pos_] == '\'') {
            if (!annotated_)
                fail("written-variable suffix not allowed here");
            written = true;
            ++pos_;
        }
        auto it = declared_.find(name);
        if (it == declared_.end())
            throw UndeclaredVariable("undeclared variable '" + name + "' in guard");
        Annotation a = !annotated_ ? Annotation::Plain : written ? Annotation::Written : Annotation::Read;
        return Var{name, it->second, a};
    }

    std::string_view text_;
    const std::map<std::string, Sort>& declared_;
    bool annotated_;
    std::size_t pos_ = 0;
};

} // namespace

Constraint parse_guard(std::string_view text, const std::map<std::string, Sort>& declared)
{
    std::string_view trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front())))
        trimmed.remove_prefix(1);
    if (trimmed.empty())
        return Constraint::truth();
    return Parser(text, declared, true).parse();
}

Constraint parse_formula(std::string_view text, const std::map<std::string, Sort>& declared)
{
    return Parser(text, declared, false).parse();
}

std::string to_guard_text(const Constraint& guard)
{
    return to_string(guard);
}

} // namespace dpnsound
