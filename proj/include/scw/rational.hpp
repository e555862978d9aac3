#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <string_view>

namespace scw {

using Rational = boost::multiprecision::cpp_rational;

// Every finite double is a rational; the conversion is exact.
Rational rational_from_double(double x);

double rational_to_double(const Rational& r);

// Parses a decimal literal ("5", "0.25", "-3.5") exactly. Returns nullopt on
// malformed input.
std::optional<Rational> rational_from_decimal(std::string_view text);

// True when the reduced denominator is of the form 2^a * 5^b, i.e. the value
// has a finite decimal expansion.
bool rational_has_decimal_form(const Rational& r);

// Exact decimal rendering; requires rational_has_decimal_form.
std::string rational_to_decimal(const Rational& r);

}  // namespace scw
