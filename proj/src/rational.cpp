#include "tileres/rational.hpp"

#include <cctype>

namespace tileres {

namespace {

bool parse_int_part(std::string_view s, bool allow_sign, BigInt& out) {
  if (s.empty()) return false;
  size_t i = 0;
  bool neg = false;
  if (allow_sign && s[0] == '-') {
    neg = true;
    i = 1;
  }
  if (i >= s.size()) return false;
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? -v : v;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view s) {
  size_t slash = s.find('/');
  BigInt num, den = 1;
  bool ok;
  if (slash == std::string_view::npos) {
    ok = parse_int_part(s, /*allow_sign=*/true, num);
  } else {
    // Sign lives on the numerator only; the denominator is a bare positive.
    ok = parse_int_part(s.substr(0, slash), /*allow_sign=*/true, num) &&
         parse_int_part(s.substr(slash + 1), /*allow_sign=*/false, den) && den != 0;
  }
  if (!ok) throw InvalidArgument("bad rational literal: '" + std::string(s) + "'");
  return Rational(num, den);
}

std::string rational_string(const Rational& r) {
  return rat_num(r).str() + "/" + rat_den(r).str();
}

std::string decimal_string(const Rational& r, int digits) {
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  BigInt num = rat_num(r) * scale * 2;
  BigInt den = rat_den(r);
  bool neg = num < 0;
  if (neg) num = -num;
  BigInt scaled = (num / den + 1) / 2;  // round half up on |r|
  BigInt ip = scaled / scale, fp = scaled % scale;
  std::string frac = fp.str();
  frac.insert(frac.begin(), static_cast<size_t>(digits) - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string out = (neg && (ip != 0 || !frac.empty())) ? "-" : "";
  out += ip.str();
  if (!frac.empty()) {
    out += '.';
    out += frac;
  }
  return out;
}

}  // namespace tileres
