#include "dpnsound/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace dpnsound {

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational result;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
        Integer d(std::string{den});
        if (d == 0)
            throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        result = Rational(Integer(std::string{num}), d);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))
            || (whole.empty() && frac.empty()))
            throw std::invalid_argument("malformed decimal literal '" + std::string(text) + "'");
        Integer scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            scale *= 10;
        Integer digits(std::string(whole.empty() ? "0" : whole) + std::string(frac));
        result = Rational(digits, scale);
    } else {
        if (!all_digits(body))
            throw std::invalid_argument("malformed integer literal '" + std::string(text) + "'");
        result = Rational(Integer(std::string{body}));
    }
    return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& value)
{
    if (is_integral(value))
        return boost::multiprecision::numerator(value).str();
    return boost::multiprecision::numerator(value).str() + "/"
           + boost::multiprecision::denominator(value).str();
}

bool is_integral(const Rational& value)
{
    return boost::multiprecision::denominator(value) == 1;
}

Integer floor(const Rational& value)
{
    Integer num = boost::multiprecision::numerator(value);
    Integer den = boost::multiprecision::denominator(value);
    Integer q = num / den;
    if (num % den != 0 && num < 0)
        q -= 1;
    return q;
}

Integer ceil(const Rational& value)
{
    Integer num = boost::multiprecision::numerator(value);
    Integer den = boost::multiprecision::denominator(value);
    Integer q = num / den;
    if (num % den != 0 && num > 0)
        q += 1;
    return q;
}

} // namespace dpnsound
