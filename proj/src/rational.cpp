#include "scw/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace scw {

using boost::multiprecision::cpp_int;

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, 0.5 <= |m| < 1
  // 53 doublings make the mantissa integral.
  long long mant = static_cast<long long>(std::ldexp(m, 53));
  exp -= 53;
  Rational r(mant);
  if (exp > 0) {
    r *= Rational(cpp_int(1) << exp);
  } else if (exp < 0) {
    r /= Rational(cpp_int(1) << -exp);
  }
  return r;
}

double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

std::optional<Rational> rational_from_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  bool neg = false;
  if (text[i] == '-' || text[i] == '+') {
    neg = text[i] == '-';
    ++i;
  }
  cpp_int digits = 0;
  int frac_len = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (seen_dot) ++frac_len;
      seen_digit = true;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  Rational r(digits);
  for (int k = 0; k < frac_len; ++k) r /= 10;
  return neg ? -r : r;
}

bool rational_has_decimal_form(const Rational& r) {
  cpp_int den = denominator(r);
  for (cpp_int p : {cpp_int(2), cpp_int(5)}) {
    while (den % p == 0) den /= p;
  }
  return den == 1;
}

std::string rational_to_decimal(const Rational& r) {
  if (!rational_has_decimal_form(r))
    throw std::invalid_argument("rational_to_decimal: denominator is not 2^a*5^b");
  cpp_int num = numerator(r);
  cpp_int den = denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  // Scale denominator to a power of ten.
  int twos = 0, fives = 0;
  cpp_int d = den;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  int digits = std::max(twos, fives);
  for (int k = twos; k < digits; ++k) num *= 2;
  for (int k = fives; k < digits; ++k) num *= 5;
  std::string s = num.str();
  std::string out;
  if (digits == 0) {
    out = s;
  } else {
    if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
    out = s.substr(0, s.size() - digits) + "." + s.substr(s.size() - digits);
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return neg ? "-" + out : out;
}

}  // namespace scw
