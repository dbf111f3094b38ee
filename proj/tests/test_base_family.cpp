#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "test_util.hpp"
#include "tileres/base_family.hpp"
#include "tileres/errors.hpp"

using namespace tileres;

namespace {

// Relatively open membership with the 0/1 endpoints absorbed, straight from
// the box intervals so it does not depend on RoSet machinery.
bool box_contains_rel(const Box& b, const std::vector<Rational>& x) {
  for (int a = 0; a < b.dim(); ++a) {
    const Rational& v = x[static_cast<size_t>(a)];
    const bool above = b.lo(a) < v || (b.lo(a) == 0 && v == 0);
    const bool below = v < b.hi(a) || (b.hi(a) == 1 && v == 1);
    if (!(above && below)) return false;
  }
  return true;
}

std::vector<int64_t> brute_candidates(const BaseFamily& f, const Box& hull,
                                      const Rational& bound) {
  std::vector<int64_t> out;
  for (int64_t i = 0; i < f.size(); ++i) {
    const Box& b = f.box(i);
    if (!(b.diameter() < bound)) continue;
    bool meet = true;
    for (int a = 0; a < f.d && meet; ++a) {
      meet = b.lo(a) <= hull.hi(a) && hull.lo(a) <= b.hi(a);
    }
    if (meet) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("base_family");

TEST_CASE("generated interval family passes the frontier-order check") {
  BaseFamily f = make_base(1, 5, rat(1, 2), 7);
  CHECK(f.n == 1);
  CHECK(f.size() == 5);
  BaseCheck c = check_base_property(f);
  CHECK(c.ok);
  CHECK(c.max_order <= 1);
  CHECK_FALSE(c.certified);  // small enough for the sweep
}

TEST_CASE("a single small interval cannot cover the segment") {
  CHECK_THROWS_AS(make_base(1, 1, rat(1, 4), 0), InvalidArgument);
  CHECK_THROWS_WITH_AS(make_base(1, 1, rat(1, 4), 0),
                       doctest::Contains("cannot cover"), InvalidArgument);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(make_base(0, 4, rat(1, 2), 0), InvalidArgument);
  CHECK_THROWS_AS(make_base(4, 99, rat(1, 2), 0), InvalidArgument);
  CHECK_THROWS_AS(make_base(1, 0, rat(1, 2), 0), InvalidArgument);
  CHECK_THROWS_AS(make_base(1, 4, rat(0, 2), 0), InvalidArgument);
  CHECK_THROWS_AS(make_base(1, 4, rat(3, 2), 0), InvalidArgument);
  CHECK_THROWS_AS(family_from_boxes(2, {unit_box(3)}), InvalidArgument);
}

TEST_CASE("same seed gives the same family, different seed does not") {
  BaseFamily a = make_base(2, 12, rat(1, 2), 41);
  BaseFamily b = make_base(2, 12, rat(1, 2), 41);
  REQUIRE(a.size() == b.size());
  for (int64_t i = 0; i < a.size(); ++i) CHECK(a.box(i) == b.box(i));
  BaseFamily c = make_base(2, 12, rat(1, 2), 42);
  bool all_equal = true;
  for (int64_t i = 0; i < a.size() && all_equal; ++i) all_equal = a.box(i) == c.box(i);
  CHECK_FALSE(all_equal);
}

TEST_CASE("shared endpoint is caught with a point witness") {
  BaseFamily f = family_from_boxes(
      1, {make_box({{Rational(0), rat(1, 2)}}), make_box({{rat(1, 2), Rational(1)}})});
  BaseCheck c = check_base_property(f);
  CHECK_FALSE(c.ok);
  CHECK(c.max_order == 2);
  REQUIRE(c.witness_point.size() == 1);
  CHECK(c.witness_point[0] == rat(1, 2));
  CHECK(c.witness_indices == std::vector<int64_t>{0, 1});
}

TEST_CASE("empty family is vacuously fine") {
  BaseCheck c = check_base_property(family_from_boxes(2, {}));
  CHECK(c.ok);
  CHECK(c.max_order == 0);
}

TEST_CASE("coverage: every point of the cube is inside some element") {
  std::mt19937_64 rng(2024);
  for (int d = 1; d <= 3; ++d) {
    // Smallest feasible count, so coverage rests on one full round alone.
    int64_t cells = 1;
    for (int a = 0; a < d; ++a) cells *= 3;
    BaseFamily f = make_base(d, cells, rat(1, 2), 100 + static_cast<uint64_t>(d));
    REQUIRE(f.size() == cells);

    std::vector<std::vector<Rational>> points;
    for (int rep = 0; rep < 60; ++rep) {
      std::vector<Rational> x;
      for (int a = 0; a < d; ++a) x.push_back(tt::rand_unit_rational(rng, 97));
      points.push_back(std::move(x));
    }
    points.push_back(std::vector<Rational>(static_cast<size_t>(d), Rational(0)));
    points.push_back(std::vector<Rational>(static_cast<size_t>(d), Rational(1)));
    // Points on an element facet must still be interior to a neighbor.
    for (int64_t i = 0; i < f.size(); ++i) {
      std::vector<Rational> x;
      for (int a = 0; a < d; ++a) x.push_back(f.box(i).lo(a) == 0 ? rat(1, 3) : f.box(i).lo(a));
      points.push_back(std::move(x));
    }

    for (const auto& x : points) {
      bool inside = false;
      for (int64_t i = 0; i < f.size() && !inside; ++i) inside = box_contains_rel(f.box(i), x);
      CHECK(inside);
    }
  }
}

TEST_CASE("every element is strictly smaller than the requested diameter") {
  const Rational bounds[] = {rat(1, 3), rat(1, 4), rat(1, 2)};
  const int64_t counts[] = {9, 49, 50};  // two rounds or more each
  for (int d = 1; d <= 3; ++d) {
    const Rational bound = bounds[d - 1];
    BaseFamily f = make_base(d, counts[d - 1], bound, 7 * static_cast<uint64_t>(d) + 1);
    for (int64_t i = 0; i < f.size(); ++i) CHECK(f.box(i).diameter() < bound);
    REQUIRE(f.segments.size() == 1);
    CHECK(f.segments[0].max_len < bound);
  }
}

TEST_CASE("interior facet coordinates are pairwise distinct per axis") {
  for (int d = 1; d <= 3; ++d) {
    BaseFamily f = make_base(d, d == 3 ? 30 : 40, rat(1, 2), 977);
    for (int a = 0; a < d; ++a) {
      std::vector<Rational> vals;
      for (const Box& b : f.boxes) {
        if (b.lo(a) != 0) vals.push_back(b.lo(a));
        if (b.hi(a) != 1) vals.push_back(b.hi(a));
      }
      std::sort(vals.begin(), vals.end());
      CHECK(std::adjacent_find(vals.begin(), vals.end()) == vals.end());
    }
  }
}

TEST_CASE("generated families satisfy the frontier bound exhaustively") {
  for (int d = 1; d <= 2; ++d) {
    BaseFamily f = make_base(d, d == 1 ? 9 : 12, rat(1, 2), 5);
    BaseCheck c = exhaustive_frontier_order(f);
    CHECK(c.ok);
    CHECK(c.max_order <= d);
  }
}

TEST_CASE("candidates agree with the direct scan") {
  std::mt19937_64 rng(31337);
  BaseFamily f1 = make_base(1, 11, rat(1, 3), 8);
  BaseFamily f2 = make_base(2, 21, rat(1, 2), 9);
  BaseFamily f3 = make_base(3, 29, rat(1, 2), 10);
  const BaseFamily* fams[] = {&f1, &f2, &f3};
  for (const BaseFamily* f : fams) {
    std::vector<Rational> bounds = {Rational(1), f->segments[0].max_len, rat(1, 50)};
    // A bound between the shortest and longest side exercises per-brick thinning.
    Rational shortest = 1;
    for (const Box& b : f->boxes) shortest = std::min(shortest, Rational(b.diameter()));
    bounds.push_back((shortest + f->segments[0].max_len) / 2);
    for (int rep = 0; rep < 25; ++rep) {
      const Box hull = tt::rand_box(rng, f->d, 37);
      for (const Rational& bound : bounds) {
        std::vector<int64_t> got;
        f->candidates(hull, bound, got);
        CHECK(got == brute_candidates(*f, hull, bound));
      }
    }
    // The whole cube as hull: the filter alone decides.
    std::vector<int64_t> got;
    f->candidates(unit_box(f->d), Rational(1), got);
    CHECK(got == brute_candidates(*f, unit_box(f->d), Rational(1)));
  }
}

TEST_CASE("hand-made families scan linearly for candidates") {
  BaseFamily f = family_from_boxes(
      1, {make_box({{Rational(0), rat(2, 3)}}), make_box({{rat(1, 3), Rational(1)}}),
          make_box({{rat(1, 4), rat(1, 2)}})});
  std::vector<int64_t> got;
  f.candidates(make_box({{rat(2, 3), rat(3, 4)}}), Rational(1), got);
  CHECK(got == std::vector<int64_t>{0, 1});
  f.candidates(unit_box(1), rat(3, 10), got);
  CHECK(got == std::vector<int64_t>{2});
}

TEST_CASE("merging rebases indices and keeps candidate lookup exact") {
  std::mt19937_64 rng(5150);
  BaseFamily a = make_base(2, 10, rat(1, 2), 21);
  BaseFamily b = make_base(2, 17, rat(1, 3), 22);
  BaseFamily m = merge_bases({a, b});
  REQUIRE(m.size() == 27);
  for (int64_t i = 0; i < a.size(); ++i) CHECK(m.box(i) == a.box(i));
  for (int64_t i = 0; i < b.size(); ++i) CHECK(m.box(a.size() + i) == b.box(i));
  REQUIRE(m.segments.size() == 2);
  CHECK(m.segments[1].first == a.size());
  for (int rep = 0; rep < 20; ++rep) {
    const Box hull = tt::rand_box(rng, 2, 29);
    for (const Rational& bound : {Rational(1), rat(1, 3), rat(1, 8)}) {
      std::vector<int64_t> got;
      m.candidates(hull, bound, got);
      CHECK(got == brute_candidates(m, hull, bound));
    }
  }
  CHECK(check_base_property(m).ok);
}

TEST_CASE("merging rejects a repeated facet coordinate") {
  BaseFamily a = family_from_boxes(1, {make_box({{Rational(0), rat(5, 8)}})});
  BaseFamily b = family_from_boxes(1, {make_box({{rat(5, 8), Rational(1)}})});
  CHECK_THROWS_WITH_AS(merge_bases({a, b}), doctest::Contains("5/8"), InvalidArgument);
  CHECK_THROWS_AS(merge_bases({}), InvalidArgument);
  BaseFamily c = family_from_boxes(2, {unit_box(2)});
  CHECK_THROWS_AS(merge_bases({a, c}), InvalidArgument);
}

TEST_CASE("first round bricks pin the cube edges exactly") {
  BaseFamily f = make_base(1, 3, rat(1, 2), 7);
  CHECK(f.box(0).lo(0) == 0);
  CHECK(f.box(2).hi(0) == 1);
  CHECK(f.box(0).hi(0) != rat(117, 256));  // jitter moved the nominal endpoint
  // Elements convert to nonempty canonical sets with matching extents.
  RoSet e = f.element(1);
  CHECK_FALSE(e.empty());
  std::vector<Rational> lo, hi;
  REQUIRE(e.extent(lo, hi));
  CHECK(lo[0] == f.box(1).lo(0));
  CHECK(hi[0] == f.box(1).hi(0));
}

TEST_SUITE_END();
