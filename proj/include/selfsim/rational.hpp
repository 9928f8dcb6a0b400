#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "selfsim/errors.hpp"

namespace selfsim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline BigInt parse_bigint(std::string_view s) {
  if (s.empty()) throw spec_error("empty integer literal");
  try {
    return BigInt(std::string(s));
  } catch (const std::exception&) {
    throw spec_error("bad integer literal: '" + std::string(s) + "'");
  }
}

}  // namespace detail

// Accepts "p/q", plain integers, and decimal literals with optional exponent
// ("0.3", "-1.25e-4"). Every accepted form converts exactly.
inline Rational parse_rational(std::string_view s) {
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = detail::parse_bigint(s.substr(0, slash));
    BigInt den = detail::parse_bigint(s.substr(slash + 1));
    if (den == 0) throw spec_error("zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
  }
  std::string_view body = s;
  long exp10 = 0;
  if (auto epos = body.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view es = body.substr(epos + 1);
    try {
      exp10 = std::stol(std::string(es));
    } catch (const std::exception&) {
      throw spec_error("bad exponent in '" + std::string(s) + "'");
    }
    body = body.substr(0, epos);
  }
  std::string digits;
  digits.reserve(body.size());
  long frac_digits = 0;
  bool seen_dot = false;
  for (char c : body) {
    if (c == '.') {
      if (seen_dot) throw spec_error("two dots in '" + std::string(s) + "'");
      seen_dot = true;
    } else {
      digits.push_back(c);
      if (seen_dot) ++frac_digits;
    }
  }
  BigInt mant = detail::parse_bigint(digits);
  long shift = exp10 - frac_digits;
  BigInt p10 = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(shift < 0 ? -shift : shift));
  return shift >= 0 ? Rational(mant * p10) : Rational(mant, p10);
}

inline Rational rational_pow(const Rational& x, int n) {
  Rational r = 1;
  Rational base = n < 0 ? Rational(1) / x : x;
  for (int i = 0; i < (n < 0 ? -n : n); ++i) r *= base;
  return r;
}

}  // namespace selfsim
