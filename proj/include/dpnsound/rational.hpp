#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace dpnsound {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "12", "-3", "0.25", "1.0", "-7/2".  Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// "3", "-1/2"
std::string to_string(const Rational& value);

bool is_integral(const Rational& value);

Integer floor(const Rational& value);
Integer ceil(const Rational& value);

} // namespace dpnsound
