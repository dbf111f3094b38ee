#include <doctest.h>

#include "tileres/errors.hpp"
#include "tileres/rational.hpp"

using namespace tileres;

TEST_SUITE("rational") {

TEST_CASE("parse round trip") {
  CHECK(parse_rational("1/3") == rat(1, 3));
  CHECK(parse_rational("2/6") == rat(1, 3));
  CHECK(parse_rational("0") == Rational(0));
  CHECK(parse_rational("0/5") == Rational(0));
  CHECK(parse_rational("1") == Rational(1));
  CHECK(parse_rational("-3/4") == rat(-3, 4));
  CHECK(rational_string(rat(1, 3)) == "1/3");
  CHECK(rational_string(Rational(0)) == "0/1");
  CHECK(rational_string(rat(4, 2)) == "2/1");
  CHECK(rational_string(rat(-3, 4)) == "-3/4");
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(parse_rational(""), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1.5"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("a/b"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1/"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("/2"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational(" 1/2"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1/-2"), InvalidArgument);
}

TEST_CASE("exact arithmetic has no drift") {
  // 1/3 summed 3000 times is exactly 1000.
  Rational s = 0;
  for (int i = 0; i < 3000; ++i) s += rat(1, 3);
  CHECK(s == Rational(1000));
  CHECK(rat(1, 3) + rat(1, 6) == rat(1, 2));
  CHECK(rat(2, 3) * rat(3, 4) == rat(1, 2));
}

TEST_CASE("decimal rendering for display") {
  CHECK(decimal_string(rat(1, 2), 4) == "0.5");
  CHECK(decimal_string(rat(1, 3), 4) == "0.3333");
  CHECK(decimal_string(rat(2, 3), 4) == "0.6667");
  CHECK(decimal_string(Rational(1), 4) == "1");
  CHECK(decimal_string(rat(-1, 8), 4) == "-0.125");
}

}  // TEST_SUITE
