#include <doctest.h>

#include <set>
#include <vector>

#include "test_util.hpp"
#include "tileres/errors.hpp"
#include "tileres/tower.hpp"

using namespace tileres;

namespace {

// Base with four covering rounds at every scale 2^{-1} .. 2^{-K}.
BaseFamily scaled_base_1d(int K, uint64_t seed) {
  const int64_t counts[] = {0, 12, 20, 40};  // 4 rounds of 3 / 5 / 10 bricks
  std::vector<BaseFamily> parts;
  for (int k = 1; k <= K; ++k)
    parts.push_back(make_base(1, counts[k], rat(1, int64_t(1) << k), seed + k));
  return merge_bases(parts);
}

BaseFamily scaled_base_2d(uint64_t seed) {
  std::vector<BaseFamily> parts;
  parts.push_back(make_base(2, 36, rat(1, 2), seed + 1));    // 4 rounds of 3x3
  parts.push_back(make_base(2, 200, rat(1, 4), seed + 2));   // 8 rounds of 5x5
  return merge_bases(parts);
}

// Closure-membership counts per face of `fine` for one level.
std::vector<int> level_counts(const Arrangement& fine, const Tiling& level) {
  std::vector<int> n(static_cast<size_t>(fine.face_count()), 0);
  for (const auto& t : level.tiles) {
    Bitset cl = fine.closure(t.faces_on(fine));
    for (auto f = cl.find_first(); f != Bitset::npos; f = cl.find_next(f))
      ++n[f];
  }
  return n;
}

ArrangementPtr tower_arrangement(const Tower& tw, const BaseFamily& base) {
  std::vector<std::vector<Rational>> cuts(static_cast<size_t>(tw.d));
  for (const auto& lvl : tw.levels)
    for (const auto& t : lvl.tiles)
      for (int a = 0; a < tw.d; ++a)
        cuts[static_cast<size_t>(a)].insert(cuts[static_cast<size_t>(a)].end(),
                                            t.arr->cuts[a].begin(),
                                            t.arr->cuts[a].end());
  for (int64_t i : tw.levels.back().budget)
    for (int a = 0; a < tw.d; ++a) {
      cuts[static_cast<size_t>(a)].push_back(base.box(i).lo(a));
      cuts[static_cast<size_t>(a)].push_back(base.box(i).hi(a));
    }
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return Arrangement::from_cuts(tw.d, std::move(cuts));
}

void check_tower_shape(const Tower& tw, const BaseFamily& base, int K) {
  REQUIRE(tw.depth() == K);
  REQUIRE(tw.levels.size() == static_cast<size_t>(K) + 1);
  REQUIRE(tw.parent.size() == tw.levels.size());
  REQUIRE(tw.schedule.size() == tw.levels.size());
  CHECK(tw.levels[0].tiles.size() == 1);
  CHECK(ro_equal(tw.levels[0].tiles[0], ro_whole(tw.d)));
  CHECK(tw.levels[0].budget.empty());

  for (int k = 0; k <= K; ++k) {
    const Tiling& lvl = tw.levels[static_cast<size_t>(k)];
    TilingReport rep = check_tiling(lvl, &base);
    CHECK(rep.ok);
    for (const auto& t : lvl.tiles)
      CHECK(t.diameter() < tw.schedule[static_cast<size_t>(k)]);
    if (k == 0) continue;
    REQUIRE(tw.parent[static_cast<size_t>(k)].size() == lvl.tiles.size());
    for (size_t c = 0; c < lvl.tiles.size(); ++c) {
      int32_t p = tw.parent[static_cast<size_t>(k)][c];
      REQUIRE(p >= 0);
      REQUIRE(static_cast<size_t>(p) <
              tw.levels[static_cast<size_t>(k) - 1].tiles.size());
      CHECK(ro_subset(lvl.tiles[c],
                      tw.levels[static_cast<size_t>(k) - 1]
                          .tiles[static_cast<size_t>(p)]));
    }
    // Budgets only grow.
    const auto& prev = tw.levels[static_cast<size_t>(k) - 1].budget;
    CHECK(std::includes(lvl.budget.begin(), lvl.budget.end(), prev.begin(),
                        prev.end()));
  }

  // Steps: per level, parents in index order, disjoint fresh index sets,
  // children matching the parent map and contained in their covers.
  size_t si = 0;
  for (int k = 0; k < K; ++k) {
    std::set<int64_t> this_level;
    const auto& prev_budget = tw.levels[static_cast<size_t>(k)].budget;
    for (int32_t t = 0;
         t < static_cast<int32_t>(tw.levels[static_cast<size_t>(k)].tiles.size());
         ++t, ++si) {
      REQUIRE(si < tw.steps.size());
      const RefinementStep& st = tw.steps[si];
      CHECK(st.level == k);
      CHECK(st.parent == t);
      CHECK(std::is_sorted(st.chosen.begin(), st.chosen.end()));
      for (int64_t i : st.chosen) {
        CHECK(!prev_budget.count(i));
        CHECK(this_level.insert(i).second);  // disjoint across the level
        CHECK(tw.levels[static_cast<size_t>(k) + 1].budget.count(i));
      }
      REQUIRE(st.children.size() == st.child_slots.size());
      for (size_t j = 0; j < st.children.size(); ++j) {
        const auto c = static_cast<size_t>(st.children[j]);
        CHECK(tw.parent[static_cast<size_t>(k) + 1][c] == t);
        const auto slot = static_cast<size_t>(st.child_slots[j]);
        REQUIRE(slot < st.chosen.size());
        CHECK(ro_subset(tw.levels[static_cast<size_t>(k) + 1].tiles[c],
                        base.element(st.chosen[slot])));
      }
    }
  }
  CHECK(si == tw.steps.size());
}

}  // namespace

TEST_SUITE("tower") {

TEST_CASE("default schedule is 2 then halving") {
  CHECK(default_schedule(0) == Rational(2));
  CHECK(default_schedule(1) == rat(1, 2));
  CHECK(default_schedule(3) == rat(1, 8));
}

TEST_CASE("depth-zero tower is the single whole-cube tile") {
  BaseFamily base = scaled_base_1d(1, 900);
  Tower tw = build_tower(base, 0);
  check_tower_shape(tw, base, 0);
  CHECK(tw.steps.empty());

  // An empty base is fine at depth zero: the property holds vacuously.
  BaseFamily none = family_from_boxes(1, {});
  Tower tw0 = build_tower(none, 0);
  CHECK(tw0.levels.size() == 1);
}

TEST_CASE("depth-3 interval tower shrinks and keeps order 2") {
  BaseFamily base = scaled_base_1d(3, 41);
  Tower tw = build_tower(base, 3);
  check_tower_shape(tw, base, 3);
  CHECK(tw.levels[3].tiles.size() >= 8);  // mesh below 1/8 forces >= 8 tiles

  // Face-exhaustive order and monotonicity sweep on a common arrangement.
  ArrangementPtr fine = tower_arrangement(tw, base);
  std::vector<std::vector<int>> counts;
  for (const auto& lvl : tw.levels) counts.push_back(level_counts(*fine, lvl));
  for (size_t f = 0; f < static_cast<size_t>(fine->face_count()); ++f) {
    for (size_t k = 0; k < counts.size(); ++k) {
      CHECK(counts[k][f] >= 1);
      CHECK(counts[k][f] <= 2);  // n + 1 with n = 1
      if (k) CHECK(counts[k - 1][f] <= counts[k][f]);
    }
  }
}

TEST_CASE("tower levels equal folded single-tile refinements") {
  BaseFamily base = scaled_base_1d(2, 77);
  Tower tw = build_tower(base, 2);
  check_tower_shape(tw, base, 2);

  Tiling cur;
  cur.tiles = {ro_whole(1)};
  size_t si = 0;
  for (int k = 0; k < 2; ++k) {
    const auto nt = tw.levels[static_cast<size_t>(k)].tiles.size();
    Tiling next = cur;
    // Refine right to left so earlier parents keep their positions.
    for (size_t t = nt; t-- > 0;) {
      const RefinementStep& st = tw.steps[si + t];
      std::vector<IndexedCover> covers;
      for (int64_t i : st.chosen) covers.push_back({i, base.element(i)});
      next = refine_tile(next, t, covers);
    }
    si += nt;
    cur = next;
    const Tiling& lvl = tw.levels[static_cast<size_t>(k) + 1];
    REQUIRE(cur.tiles.size() == lvl.tiles.size());
    for (size_t t = 0; t < cur.tiles.size(); ++t)
      CHECK(ro_equal(cur.tiles[t], lvl.tiles[t]));
    CHECK(cur.budget == lvl.budget);
  }
}

TEST_CASE("greedy keeps redundant elements that meet the tile") {
  // B1 sits inside B0, so it is kept by the scan (it meets cl X before
  // coverage completes) but carves to nothing.
  BaseFamily base = family_from_boxes(
      1, {make_box({{Rational(0), rat(5, 8)}}),
          make_box({{rat(1, 4), rat(3, 8)}}),
          make_box({{rat(1, 2), Rational(1)}})});
  Tower tw = build_tower(base, 1, {Rational(2), Rational(1)});
  REQUIRE(tw.steps.size() == 1);
  CHECK(tw.steps[0].chosen == std::vector<int64_t>{0, 1, 2});
  CHECK(tw.steps[0].child_slots == std::vector<int64_t>{0, 2});
  REQUIRE(tw.levels[1].tiles.size() == 2);
  CHECK(ro_equal(tw.levels[1].tiles[0],
                 ro_from_box(make_box({{Rational(0), rat(5, 8)}}))));
  CHECK(ro_equal(tw.levels[1].tiles[1],
                 ro_from_box(make_box({{rat(5, 8), Rational(1)}}))));
  CHECK(tw.levels[1].budget == std::set<int64_t>{0, 1, 2});
}

TEST_CASE("starved scan reports the tile and the missing scale") {
  BaseFamily base = make_base(1, 6, rat(1, 2), 5);  // nothing below 1/4
  try {
    build_tower(base, 2);
    FAIL("expected BaseExhausted");
  } catch (const BaseExhausted& e) {
    CHECK(e.tile.find("level 1 tile 0") != std::string::npos);
    CHECK(std::string(e.what()).find("1/4") != std::string::npos);
  }
}

TEST_CASE("bad inputs fail before any construction") {
  // Shared endpoint: two frontiers meet at {1/2}, violating order <= 1.
  BaseFamily shared = family_from_boxes(
      1, {make_box({{Rational(0), rat(1, 2)}}),
          make_box({{rat(1, 2), Rational(1)}})});
  CHECK_THROWS_WITH_AS(build_tower(shared, 1),
                       doctest::Contains("frontier order"), InvalidArgument);

  BaseFamily base = scaled_base_1d(1, 3);
  CHECK_THROWS_AS(build_tower(base, -1), InvalidArgument);
  CHECK_THROWS_AS(build_tower(base, 1, {Rational(2)}), InvalidArgument);
  // schedule[0] must exceed diam X = 1.
  CHECK_THROWS_AS(build_tower(base, 1, {Rational(1), rat(1, 2)}),
                  InvalidArgument);
}

TEST_CASE("tower is independent of the carve job count") {
  BaseFamily base = scaled_base_1d(2, 1234);
  TowerOptions serial, parallel;
  serial.jobs = 1;
  parallel.jobs = 4;
  Tower a = build_tower(base, 2, {}, serial);
  Tower b = build_tower(base, 2, {}, parallel);
  REQUIRE(a.levels.size() == b.levels.size());
  for (size_t k = 0; k < a.levels.size(); ++k) {
    REQUIRE(a.levels[k].tiles.size() == b.levels[k].tiles.size());
    for (size_t t = 0; t < a.levels[k].tiles.size(); ++t)
      CHECK(ro_equal(a.levels[k].tiles[t], b.levels[k].tiles[t]));
    CHECK(a.levels[k].budget == b.levels[k].budget);
  }
  REQUIRE(a.steps.size() == b.steps.size());
  for (size_t s = 0; s < a.steps.size(); ++s) {
    CHECK(a.steps[s].chosen == b.steps[s].chosen);
    CHECK(a.steps[s].children == b.steps[s].children);
  }
}

TEST_CASE("planar tower keeps order 3 and the budget property") {
  BaseFamily base = scaled_base_2d(2026);
  Tower tw = build_tower(base, 2);
  check_tower_shape(tw, base, 2);
  CHECK(tw.levels[2].tiles.size() > tw.levels[1].tiles.size());

  ArrangementPtr fine = tower_arrangement(tw, base);
  for (const auto& lvl : tw.levels) {
    std::vector<int> n = level_counts(*fine, lvl);
    for (size_t f = 0; f < n.size(); ++f) {
      CHECK(n[f] >= 1);
      CHECK(n[f] <= 3);  // n + 1 with n = 2
    }
  }
}

}  // TEST_SUITE
