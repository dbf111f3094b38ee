#include <doctest.h>

#include <random>
#include <vector>

#include "../src/carve_internal.hpp"
#include "test_util.hpp"
#include "tileres/errors.hpp"
#include "tileres/tiling.hpp"

using namespace tileres;
namespace cd = tileres::carvedetail;

namespace {

RoSet iv(int64_t lo_n, int64_t lo_d, int64_t hi_n, int64_t hi_d) {
  return ro_from_box(make_box({{rat(lo_n, lo_d), rat(hi_n, hi_d)}}));
}

RoSet box2(std::array<Rational, 2> x, std::array<Rational, 2> y) {
  return ro_from_box(make_box({x, y}));
}

// Pieces agree slot-for-slot as sets.
void check_same_pieces(const std::vector<CarvedPiece>& a,
                       const std::vector<CarvedPiece>& b) {
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].slot == b[i].slot);
    CHECK(ro_equal(a[i].part, b[i].part));
  }
}

}  // namespace

TEST_SUITE("tiling") {

TEST_CASE("carve splits an interval at the first cover's upper end") {
  RoSet tile = ro_whole(1);
  std::vector<RoSet> covers = {iv(0, 1, 2, 3), iv(1, 3, 1, 1)};
  auto pieces = carve_tile(tile, covers);
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].slot == 0);
  CHECK(pieces[1].slot == 1);
  CHECK(ro_equal(pieces[0].part, iv(0, 1, 2, 3)));
  CHECK(ro_equal(pieces[1].part, iv(2, 3, 1, 1)));
  check_same_pieces(pieces, carve_tile_reference(tile, covers));
}

TEST_CASE("carve with a single full cover returns the tile") {
  RoSet tile = iv(1, 4, 3, 4);
  std::vector<RoSet> covers = {ro_whole(1)};
  auto pieces = carve_tile(tile, covers);
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].slot == 0);
  CHECK(ro_equal(pieces[0].part, tile));
  check_same_pieces(pieces, carve_tile_reference(tile, covers));
}

TEST_CASE("carve reports an uncovered interval with its witness") {
  RoSet tile = ro_whole(1);
  std::vector<RoSet> covers = {iv(0, 1, 1, 3), iv(1, 2, 1, 1)};
  CHECK_THROWS_WITH_AS(carve_tile(tile, covers),
                       doctest::Contains("miss"), CoverError);
  try {
    carve_tile(tile, covers);
  } catch (const CoverError& e) {
    CHECK(e.witness_face == "(1/3,1/2)");
  }
  try {
    carve_tile_reference(tile, covers);
  } catch (const CoverError& e) {
    CHECK(e.witness_face == "(1/3,1/2)");
  }
}

TEST_CASE("carve reports a single missed point") {
  // (0,1/3) and (1/3,1) miss exactly the point 1/3.
  RoSet tile = ro_whole(1);
  std::vector<RoSet> covers = {iv(0, 1, 1, 3), iv(1, 3, 1, 1)};
  for (auto* fn : {&carve_tile, &carve_tile_reference}) {
    try {
      (*fn)(tile, covers);
      FAIL("expected CoverError");
    } catch (const CoverError& e) {
      CHECK(e.witness_face == "{1/3}");
    }
  }
}

TEST_CASE("carve with an empty cover list reports the whole tile") {
  try {
    carve_tile(iv(1, 4, 3, 4), {});
    FAIL("expected CoverError");
  } catch (const CoverError& e) {
    CHECK(e.witness_face == "(1/4,3/4)");
  }
}

TEST_CASE("carve rejects an empty tile and mismatched dimensions") {
  CHECK_THROWS_AS(carve_tile(ro_empty(1), {ro_whole(1)}), InvalidArgument);
  CHECK_THROWS_AS(carve_tile_reference(ro_empty(1), {ro_whole(1)}),
                  InvalidArgument);
  CHECK_THROWS_AS(carve_tile(ro_whole(2), {ro_whole(1)}), InvalidArgument);
  CHECK_THROWS_AS(carve_tile_reference(ro_whole(2), {ro_whole(1)}),
                  InvalidArgument);
}

TEST_CASE("carve leaves an annulus when the second cover is the cube") {
  RoSet center = box2({rat(1, 3), rat(2, 3)}, {rat(1, 3), rat(2, 3)});
  std::vector<RoSet> covers = {center, ro_whole(2)};
  auto pieces = carve_tile(ro_whole(2), covers);
  REQUIRE(pieces.size() == 2);
  CHECK(ro_equal(pieces[0].part, center));
  CHECK(ro_equal(pieces[1].part, ro_complement(center)));
  CHECK(pieces[1].part.full_cells().size() == 8);
  check_same_pieces(pieces, carve_tile_reference(ro_whole(2), covers));
}

TEST_CASE("carve piece frontiers may cross between cover shells") {
  // The third piece is (1/2,7/8)x(1/8,7/8); its left frontier edge lies
  // partly on Fr B0 and partly on Fr B1, so no single cover shell contains
  // it. The carve must still accept it.
  std::vector<RoSet> covers = {
      box2({Rational(0), rat(1, 2)}, {Rational(0), rat(1, 2)}),
      box2({Rational(0), rat(1, 2)}, {rat(1, 3), Rational(1)}),
      box2({rat(1, 8), rat(7, 8)}, {rat(1, 8), rat(7, 8)}),
      box2({rat(1, 3), Rational(1)}, {Rational(0), Rational(1)})};
  auto pieces = carve_tile(ro_whole(2), covers);
  REQUIRE(pieces.size() == 4);
  CHECK(ro_equal(pieces[2].part,
                 box2({rat(1, 2), rat(7, 8)}, {rat(1, 8), rat(7, 8)})));
  check_same_pieces(pieces, carve_tile_reference(ro_whole(2), covers));
}

TEST_CASE("carve agrees with the reference on random box covers") {
  std::mt19937_64 g(20260816);
  for (int rep = 0; rep < 40; ++rep) {
    const int d = 1 + static_cast<int>(tt::rand_below(g, 3));
    RoSet tile = tt::rand_roset(g, d, d == 3 ? 2 : 3);
    while (tile.empty()) tile = tt::rand_roset(g, d, d == 3 ? 2 : 3);
    std::vector<RoSet> covers;
    const int nboxes = 1 + static_cast<int>(tt::rand_below(g, 3));
    for (int i = 0; i < nboxes; ++i)
      covers.push_back(ro_from_box(tt::rand_box(g, d)));
    covers.push_back(ro_whole(d));  // guarantees coverage
    auto fast = carve_tile(tile, covers);
    auto ref = carve_tile_reference(tile, covers);
    check_same_pieces(fast, ref);

    // Pieces tile the tile: disjoint, closures covering cl tile.
    RoSet join = ro_empty(d);
    for (size_t i = 0; i < fast.size(); ++i) {
      CHECK(!fast[i].part.empty());
      for (size_t j = i + 1; j < fast.size(); ++j)
        CHECK(ro_disjoint(fast[i].part, fast[j].part));
      join = ro_join(join, fast[i].part);
    }
    CHECK(ro_equal(join, tile));  // Int cl of the union restores the tile
  }
}

TEST_CASE("carve agrees with the reference when covers miss the tile") {
  std::mt19937_64 g(424242);
  int misses = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const int d = 1 + static_cast<int>(tt::rand_below(g, 2));
    RoSet tile = tt::rand_roset(g, d);
    while (tile.empty()) tile = tt::rand_roset(g, d);
    std::vector<RoSet> covers;
    const int nboxes = 1 + static_cast<int>(tt::rand_below(g, 3));
    for (int i = 0; i < nboxes; ++i)
      covers.push_back(ro_from_box(tt::rand_box(g, d)));
    if (tt::rand_below(g, 2) == 0) {
      // Half the draws are made coverable on purpose.
      covers.insert(covers.begin() + static_cast<long>(tt::rand_below(
                                         g, covers.size() + 1)),
                    ro_whole(d));
    }
    bool fast_threw = false, ref_threw = false;
    std::vector<CarvedPiece> fast, ref;
    try {
      fast = carve_tile(tile, covers);
    } catch (const CoverError& e) {
      fast_threw = true;
      CHECK(!e.witness_face.empty());
    }
    try {
      ref = carve_tile_reference(tile, covers);
    } catch (const CoverError& e) {
      ref_threw = true;
      CHECK(!e.witness_face.empty());
    }
    REQUIRE(fast_threw == ref_threw);
    if (!fast_threw) check_same_pieces(fast, ref);
    misses += fast_threw;
  }
  CHECK(misses > 5);  // the draw actually exercises both outcomes
  CHECK(misses < 40);
}

TEST_CASE("refine splits the unit tile and grows the budget") {
  Tiling t;
  t.tiles = {ro_whole(1)};
  std::vector<IndexedCover> covers = {{0, iv(0, 1, 9, 16)},
                                      {1, iv(7, 16, 1, 1)}};
  std::vector<CarvedPiece> pieces;
  Tiling r = refine_tile(t, 0, covers, &pieces);
  REQUIRE(r.tiles.size() == 2);
  CHECK(ro_equal(r.tiles[0], iv(0, 1, 9, 16)));
  CHECK(ro_equal(r.tiles[1], iv(9, 16, 1, 1)));
  CHECK(r.budget == std::set<int64_t>{0, 1});
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].slot == 0);
  CHECK(ro_equal(pieces[1].part, r.tiles[1]));

  auto base = family_from_boxes(
      1, {make_box({{Rational(0), rat(9, 16)}}),
          make_box({{rat(7, 16), Rational(1)}})});
  TilingReport rep = check_tiling(r, &base);
  CHECK(rep.ok);
  CHECK(rep.what.empty());
}

TEST_CASE("refine with a single full cover keeps the tile and spends the index") {
  Tiling t;
  t.tiles = {ro_whole(1)};
  Tiling r = refine_tile(t, 0, {{5, ro_whole(1)}});
  REQUIRE(r.tiles.size() == 1);
  CHECK(ro_equal(r.tiles[0], ro_whole(1)));
  CHECK(r.budget == std::set<int64_t>{5});
}

TEST_CASE("refine rejects spent or repeated indices") {
  Tiling t;
  t.tiles = {ro_whole(1)};
  t.budget = {3};
  CHECK_THROWS_WITH_AS(refine_tile(t, 0, {{3, ro_whole(1)}}),
                       doctest::Contains("3"), IndexCollision);
  CHECK_THROWS_AS(
      refine_tile(t, 0, {{4, iv(0, 1, 2, 3)}, {4, iv(1, 3, 1, 1)}}),
      IndexCollision);
  // Failed refinements leave the input untouched.
  CHECK(t.budget == std::set<int64_t>{3});
  CHECK(t.tiles.size() == 1);
}

TEST_CASE("refine propagates cover violations and bad indices") {
  Tiling t;
  t.tiles = {ro_whole(1)};
  CHECK_THROWS_AS(
      refine_tile(t, 0, {{0, iv(0, 1, 1, 3)}, {1, iv(1, 2, 1, 1)}}),
      CoverError);
  CHECK_THROWS_AS(refine_tile(t, 1, {{0, ro_whole(1)}}), InvalidArgument);
}

TEST_CASE("refine replaces the chosen tile in place") {
  Tiling t;
  t.tiles = {ro_whole(1)};
  t = refine_tile(t, 0, {{0, iv(0, 1, 1, 2)}, {1, iv(3, 8, 1, 1)}});
  REQUIRE(t.tiles.size() == 2);
  Tiling r = refine_tile(
      t, 1, {{2, iv(3, 8, 3, 4)}, {3, iv(5, 8, 1, 1)}});
  REQUIRE(r.tiles.size() == 3);
  CHECK(ro_equal(r.tiles[0], iv(0, 1, 1, 2)));       // untouched
  CHECK(ro_equal(r.tiles[1], iv(1, 2, 3, 4)));       // first piece of tile 1
  CHECK(ro_equal(r.tiles[2], iv(3, 4, 1, 1)));       // second piece
  CHECK(r.budget == std::set<int64_t>{0, 1, 2, 3});
  TilingReport rep = check_tiling(r);
  CHECK(rep.ok);
}

TEST_CASE("check_tiling accepts the trivial tiling") {
  Tiling t;
  t.tiles = {ro_whole(2)};
  TilingReport rep = check_tiling(t);
  CHECK(rep.ok);
}

TEST_CASE("check_tiling rejects structural defects") {
  SUBCASE("no tiles") {
    Tiling t;
    CHECK(check_tiling(t).what == "tiling has no tiles");
  }
  SUBCASE("empty tile") {
    Tiling t;
    t.tiles = {ro_whole(1), ro_empty(1)};
    TilingReport rep = check_tiling(t);
    CHECK(rep.what == "empty tile");
    CHECK(rep.witness_face == "tile 1");
  }
  SUBCASE("non-canonical tile") {
    // (0,1/2) union (1/2,1) without the healing point {1/2}.
    ArrangementPtr arr =
        Arrangement::from_cuts(1, {{Rational(0), rat(1, 2), Rational(1)}});
    Bitset bits(static_cast<size_t>(arr->face_count()));
    bits.set(1);  // (0,1/2)
    bits.set(3);  // (1/2,1)
    Tiling t;
    t.tiles = {RoSet{arr, bits}};
    TilingReport rep = check_tiling(t);
    CHECK(rep.what == "tile is not canonical");
  }
  SUBCASE("overlapping tiles") {
    Tiling t;
    t.tiles = {iv(0, 1, 2, 3), iv(1, 3, 1, 1)};
    TilingReport rep = check_tiling(t);
    CHECK(rep.what == "tiles overlap");
    CHECK(rep.witness_face == "(1/3,2/3)");
  }
  SUBCASE("closures not covering") {
    Tiling t;
    t.tiles = {iv(0, 1, 1, 3), iv(1, 2, 1, 1)};
    TilingReport rep = check_tiling(t);
    CHECK(rep.what == "tile closures do not cover the cube");
    CHECK(rep.witness_face == "(1/3,1/2)");
  }
  SUBCASE("dimension mismatch") {
    Tiling t;
    t.tiles = {ro_whole(1), ro_whole(2)};
    CHECK(check_tiling(t).what == "tile dimension mismatch");
  }
}

TEST_CASE("check_tiling enforces the frontier budget") {
  auto base = family_from_boxes(
      1, {make_box({{Rational(0), rat(9, 16)}}),
          make_box({{rat(7, 16), Rational(1)}})});
  Tiling t;
  t.tiles = {iv(0, 1, 9, 16), iv(9, 16, 1, 1)};

  SUBCASE("paying index present") {
    t.budget = {0};  // {9/16} lies on Fr B_0
    CHECK(check_tiling(t, &base).ok);
  }
  SUBCASE("budget empty") {
    TilingReport rep = check_tiling(t, &base);
    CHECK(rep.what == "frontier budget exceeded");
    CHECK(rep.witness_face == "{9/16}");
  }
  SUBCASE("wrong index spent") {
    t.budget = {1};  // Fr B_1 is {7/16}, which pays for nothing here
    TilingReport rep = check_tiling(t, &base);
    CHECK(rep.what == "frontier budget exceeded");
    CHECK(rep.witness_face == "{9/16}");
  }
  SUBCASE("budget index out of range") {
    t.budget = {7};
    TilingReport rep = check_tiling(t, &base);
    CHECK(rep.what == "budget index out of range");
    CHECK(rep.witness_face == "7");
  }
}

TEST_CASE("shard subtraction keeps boundary shells and degenerate leftovers") {
  // Grid: cell [0,1]^2 and the box (1/4,3/4)^2; ranks 0..3 per axis.
  cd::RankGrid g = cd::make_grid(
      2, {unit_box(2)},
      {make_box({{rat(1, 4), rat(3, 4)}, {rat(1, 4), rat(3, 4)}})});
  cd::RankBox cell{{0, 0, 0}, {3, 3, 0}};
  cd::RankBox mid{{1, 1, 0}, {2, 2, 0}};

  std::vector<cd::RankBox> open_rem = {cell};
  cd::subtract_open(open_rem, mid, 2, g);
  REQUIRE(open_rem.size() == 4);
  // Left/right strips span the full second axis; top/bottom keep the shell.
  CHECK(open_rem[0].hi[0] == 1);
  CHECK(open_rem[1].lo[0] == 2);
  CHECK((open_rem[2].lo[0] == 1 && open_rem[2].hi[0] == 2));
  CHECK((open_rem[2].lo[1] == 0 && open_rem[2].hi[1] == 1));

  // Subtracting the closure instead drops the shell and keeps full dimension.
  std::vector<cd::RankBox> closed_rem = {cell};
  cd::subtract_closed_fulldim(closed_rem, mid, 2);
  REQUIRE(closed_rem.size() == 4);
  for (const auto& s : closed_rem) {
    CHECK(s.lo[0] < s.hi[0]);
    CHECK(s.lo[1] < s.hi[1]);
    CHECK(!cd::fulldim_overlap(2, s, mid));
  }

  // A degenerate shard survives subtraction as point slabs.
  std::vector<cd::RankBox> line = {cd::RankBox{{1, 0, 0}, {1, 3, 0}}};
  cd::RankBox slab{{0, 1, 0}, {2, 2, 0}};
  cd::subtract_open(line, slab, 2, g);
  REQUIRE(line.size() == 2);
  CHECK(cd::shard_string(g, line[0]) == "{1/4} x (0/1,1/4)");
  CHECK(cd::shard_string(g, line[1]) == "{1/4} x (3/4,1/1)");
  CHECK(cd::max_dim_shard(line, 2) == 0);
}

}  // TEST_SUITE
