#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "tileres/errors.hpp"

namespace tileres {

// Exact rational scalar. Arbitrary precision, always lowest terms with a
// positive denominator (the backing type canonicalizes on construction).
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat(long long p, long long q) {
  if (q == 0) throw InvalidArgument("rational with zero denominator");
  return Rational(p, q);
}

inline BigInt rat_num(const Rational& r) { return numerator(r); }
inline BigInt rat_den(const Rational& r) { return denominator(r); }

// Serialized form is "p/q"; a bare integer "p" means p/1.
Rational parse_rational(std::string_view s);
std::string rational_string(const Rational& r);

// Fixed-point decimal rendering, round-to-nearest, locale independent.
// Display only; never feeds back into geometry.
std::string decimal_string(const Rational& r, int digits);

}  // namespace tileres
