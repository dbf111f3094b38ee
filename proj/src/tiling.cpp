#include "tileres/tiling.hpp"

#include <algorithm>
#include <cstdint>

#include "carve_internal.hpp"
#include "tileres/errors.hpp"

namespace tileres {

namespace cd = carvedetail;

namespace {

// Guard for the reference path, which allocates whole-arrangement bitsets on
// the common refinement of every carrier involved.
constexpr int64_t kMaxCarveFaces = int64_t(1) << 22;
constexpr int64_t kMaxCheckFaces = int64_t(1) << 22;

ArrangementPtr merge_all(const RoSet& tile, const std::vector<RoSet>& covers,
                         const std::vector<Box>* extra_boxes) {
  int d = tile.dim();
  std::vector<std::vector<Rational>> cuts(d);
  auto add = [&](const Arrangement& a) {
    for (int ax = 0; ax < d; ++ax)
      cuts[ax].insert(cuts[ax].end(), a.cuts[ax].begin(), a.cuts[ax].end());
  };
  add(*tile.arr);
  for (const auto& c : covers) {
    if (c.dim() != d) throw InvalidArgument("cover dimension mismatch");
    add(*c.arr);
  }
  if (extra_boxes) {
    for (const auto& b : *extra_boxes) {
      for (int ax = 0; ax < d; ++ax) {
        cuts[ax].push_back(b.lo(ax));
        cuts[ax].push_back(b.hi(ax));
      }
    }
  }
  for (int ax = 0; ax < d; ++ax) {
    std::sort(cuts[ax].begin(), cuts[ax].end());
    cuts[ax].erase(std::unique(cuts[ax].begin(), cuts[ax].end()),
                   cuts[ax].end());
  }
  return Arrangement::from_cuts(d, std::move(cuts));
}

// --- reference path -------------------------------------------------------
//
// Everything happens as face sets of the common refinement, where every set
// in sight is a union of faces, so the raw-piece formula, the cover check,
// and the frontier containment are all plain bitset algebra.

std::vector<CarvedPiece> carve_faceset(const RoSet& tile,
                                       const std::vector<RoSet>& covers) {
  ArrangementPtr fine = merge_all(tile, covers, nullptr);
  if (fine->face_count() > kMaxCarveFaces)
    throw GuardExceeded("carve arrangement too large for the reference path");

  const Bitset tb = tile.faces_on(*fine);
  const Bitset tcl = fine->closure(tb);
  std::vector<Bitset> cb(covers.size());
  for (size_t i = 0; i < covers.size(); ++i)
    cb[i] = covers[i].faces_on(*fine);

  Bitset uncovered = tcl;
  for (size_t i = 0; i < covers.size() && uncovered.any(); ++i)
    uncovered -= cb[i];
  if (uncovered.any()) {
    int64_t witness = -1;
    int best = -1;
    for (auto f = uncovered.find_first(); f != Bitset::npos;
         f = uncovered.find_next(f)) {
      int dim = fine->face_dim(static_cast<int64_t>(f));
      if (dim > best) {
        best = dim;
        witness = static_cast<int64_t>(f);
      }
    }
    throw CoverError("covers miss part of the tile closure",
                     fine->face_string(witness));
  }

  // Faces allowed to carry piece frontiers: Fr tile plus every Fr cover.
  Bitset allow = tcl - tb;
  for (size_t i = 0; i < covers.size(); ++i)
    allow |= fine->closure(cb[i]) - cb[i];

  std::vector<CarvedPiece> out;
  Bitset used_cl(static_cast<size_t>(fine->face_count()));
  Bitset seen(static_cast<size_t>(fine->face_count()));
  Bitset cl_union(static_cast<size_t>(fine->face_count()));
  for (size_t i = 0; i < covers.size(); ++i) {
    Bitset raw = tb & cb[i];
    raw -= used_cl;
    used_cl |= fine->closure(cb[i]);
    Bitset reg = fine->regularized(raw);
    if (!reg.any()) continue;
    Bitset cl = fine->closure(reg);
    if (((cl - reg) - allow).any())
      throw Error("internal: carve frontier outside allowed boundaries");
    if ((reg & seen).any()) throw Error("internal: carve pieces overlap");
    seen |= reg;
    cl_union |= cl;
    out.push_back(
        {static_cast<int64_t>(i), RoSet{fine, std::move(reg)}.compressed()});
  }
  if (!tcl.is_subset_of(cl_union))
    throw Error("internal: carve pieces do not cover the tile");
  return out;
}

// --- rank-space path ------------------------------------------------------
//
// When every cover is a single box, the closure of each raw piece is a union
// of closed boxes maintained exactly by shard subtraction, and only the
// final canonicalization of each piece touches an arrangement (one built
// from that piece's own few coordinates). Rational arithmetic is confined
// to the interning pass and the per-piece construction.

// Shell tests on closed rank extents [rlo, rhi] against a cover box in the
// same grid. Rank order equals value order, rank 0 is the value 0 and the
// last rank is 1, so absorption at the ambient boundary is a rank test too.
bool rank_in_closure(int d, const cd::RankBox& b, const int32_t* rlo,
                     const int32_t* rhi) {
  for (int a = 0; a < d; ++a)
    if (rlo[a] < b.lo[a] || rhi[a] > b.hi[a]) return false;
  return true;
}

bool rank_meets_open(int d, const cd::RankGrid& g, const cd::RankBox& b,
                     const int32_t* rlo, const int32_t* rhi) {
  for (int a = 0; a < d; ++a) {
    if (!(rhi[a] > b.lo[a] || b.lo[a] == 0)) return false;
    if (!(rlo[a] < b.hi[a] || b.hi[a] == g.last(a))) return false;
  }
  return true;
}

bool rank_in_frontier(int d, const cd::RankGrid& g, const cd::RankBox& b,
                      const int32_t* rlo, const int32_t* rhi) {
  return rank_in_closure(d, b, rlo, rhi) && !rank_meets_open(d, g, b, rlo, rhi);
}

// The open denotation of the closed cell contains the sub-item with rank
// extent [slo, shi] (a point when equal, else an open interval per axis).
bool rank_open_contains(int d, const cd::RankGrid& g, const cd::RankBox& c,
                        const int32_t* slo, const int32_t* shi) {
  for (int a = 0; a < d; ++a) {
    if (slo[a] == shi[a]) {
      const int32_t r = slo[a];
      const bool inside = (c.lo[a] < r && r < c.hi[a]) ||
                          (r == c.lo[a] && c.lo[a] == 0) ||
                          (r == c.hi[a] && c.hi[a] == g.last(a));
      if (!inside) return false;
    } else {
      if (slo[a] < c.lo[a] || shi[a] > c.hi[a]) return false;
    }
  }
  return true;
}

bool rank_closed_disjoint(int d, const cd::RankBox& c, const int32_t* slo,
                          const int32_t* shi) {
  for (int a = 0; a < d; ++a)
    if (shi[a] < c.lo[a] || c.hi[a] < slo[a]) return true;
  return false;
}

// Exact fallback for the frontier containment assert: decide
//   f subset of  Fr tile ∪ ⋃_{j<=i} Fr covers[j]
// by partitioning f along every cover facet and tile cell coordinate that
// crosses it. Each part is then homogeneous with respect to every cover
// shell and with respect to the tile, so one shell test (or one membership
// probe) decides it. Single-shell tests on the whole face are not enough:
// a face can cross from one cover's shell onto another's.
//
// Runs in rank space: [frlo, frhi] is the face's closed rank extent in
// `grid`, which already interns every cover and tile cell coordinate. The
// only rational step left is the membership probe for a sub-item gluing two
// tile cells, where open containment in a single cell cannot decide.
bool face_in_allowed_frontiers_rank(int d, const cd::RankGrid& grid,
                                    const int32_t* frlo, const int32_t* frhi,
                                    const RoSet& tile,
                                    const std::vector<cd::RankBox>& tcells,
                                    const std::vector<cd::RankBox>& cov,
                                    size_t upto) {
  std::vector<int32_t> sub[3];
  for (int a = 0; a < d; ++a) {
    sub[a].push_back(frlo[a]);
    if (frhi[a] > frlo[a]) sub[a].push_back(frhi[a]);
    if (frlo[a] == frhi[a]) continue;  // cut axis of f: never subdivided
    auto consider = [&](int32_t r) {
      if (r > frlo[a] && r < frhi[a]) sub[a].push_back(r);
    };
    for (size_t j = 0; j <= upto && j < cov.size(); ++j) {
      consider(cov[j].lo[a]);
      consider(cov[j].hi[a]);
    }
    for (const auto& c : tcells) {
      consider(c.lo[a]);
      consider(c.hi[a]);
    }
    std::sort(sub[a].begin(), sub[a].end());
    sub[a].erase(std::unique(sub[a].begin(), sub[a].end()), sub[a].end());
  }

  // Walk the sub-items: per axis, even item 2k = point sub[a][k], odd item
  // 2k+1 = open interval (sub[a][k], sub[a][k+1]). Interior items only;
  // the end points of an interval axis belong to neighbouring faces.
  int32_t it[3], nitems[3], first[3];
  for (int a = 0; a < d; ++a) {
    nitems[a] = 2 * static_cast<int32_t>(sub[a].size()) - 1;
    first[a] = (frlo[a] == frhi[a]) ? 0 : 1;
    it[a] = first[a];
  }
  int32_t slo[3], shi[3];
  std::vector<Rational> mid(d);
  for (;;) {
    for (int a = 0; a < d; ++a) {
      if (it[a] & 1) {
        slo[a] = sub[a][(it[a] - 1) >> 1];
        shi[a] = sub[a][(it[a] + 1) >> 1];
      } else {
        slo[a] = shi[a] = sub[a][it[a] >> 1];
      }
    }
    bool ok = false;
    for (size_t j = 0; j <= upto && j < cov.size() && !ok; ++j)
      ok = rank_in_frontier(d, grid, cov[j], slo, shi);
    if (!ok) {
      // Not on an allowed shell, so the sub-item must avoid the tile. The
      // subdivision includes all tile cell coordinates, so membership is
      // constant on it: inside some cell's open denotation means inside;
      // closed-disjoint from every cell means outside cl tile. A sub-item
      // that only touches cell boundaries can still be glued into the tile
      // by regularization; probe one of its points for that case.
      bool in_any = false, touch_any = false;
      for (const auto& c : tcells) {
        if (rank_open_contains(d, grid, c, slo, shi)) {
          in_any = true;
          break;
        }
        if (!rank_closed_disjoint(d, c, slo, shi)) touch_any = true;
      }
      if (in_any)
        ok = false;
      else if (!touch_any)
        ok = true;
      else {
        for (int a = 0; a < d; ++a)
          mid[a] = slo[a] == shi[a] ? grid.vals[a][slo[a]]
                                    : (grid.vals[a][slo[a]] +
                                       grid.vals[a][shi[a]]) /
                                          2;
        ok = !tile.contains_point(mid);
      }
    }
    if (!ok) return false;
    int a = 0;
    for (; a < d; ++a) {
      if (it[a] + 1 < nitems[a] - first[a]) {
        ++it[a];
        break;
      }
      it[a] = first[a];
    }
    if (a == d) break;
  }
  return true;
}

std::vector<CarvedPiece> carve_rankspace(const RoSet& tile,
                                         const std::vector<Box>& boxes) {
  const int d = tile.dim();
  const std::vector<Box> cells = tile.full_cells();
  const cd::RankGrid grid = cd::make_grid(d, cells, boxes);

  std::vector<cd::RankBox> tcells(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) tcells[i] = to_rank(grid, cells[i]);
  std::vector<cd::RankBox> cov(boxes.size());
  for (size_t i = 0; i < boxes.size(); ++i) cov[i] = to_rank(grid, boxes[i]);

  // Cover check: closed shards of cl tile minus each open cover, degenerate
  // leftovers included. Any survivor is exactly a missed part of cl tile.
  std::vector<cd::RankBox> uncovered = tcells;
  for (size_t i = 0; i < cov.size() && !uncovered.empty(); ++i)
    cd::subtract_open(uncovered, cov[i], d, grid);
  if (!uncovered.empty()) {
    size_t w = cd::max_dim_shard(uncovered, d);
    throw CoverError("covers miss part of the tile closure",
                     cd::shard_string(grid, uncovered[w]));
  }

  std::vector<CarvedPiece> out;
  std::vector<cd::RankBox> shards;
  for (size_t i = 0; i < cov.size(); ++i) {
    // Shards tracking cl(tile ∩ covers[i]): full-dimensional closed
    // intersections of the tile cells with the cover box.
    shards.clear();
    for (const auto& tc : tcells) {
      if (!cd::fulldim_overlap(d, tc, cov[i])) continue;
      cd::RankBox s = tc;
      for (int a = 0; a < d; ++a) {
        s.lo[a] = std::max(s.lo[a], cov[i].lo[a]);
        s.hi[a] = std::min(s.hi[a], cov[i].hi[a]);
      }
      shards.push_back(s);
    }
    // Remove the closures of the earlier covers. Degenerate touches are
    // skipped inside: deleting a lower-dimensional closed slice does not
    // move the closure being tracked.
    for (size_t j = 0; j < i && !shards.empty(); ++j)
      cd::subtract_closed_fulldim(shards, cov[j], d);
    if (shards.empty()) continue;

    for (const auto& s : shards)
      for (size_t j = 0; j < i; ++j)
        if (cd::fulldim_overlap(d, s, cov[j]))
          throw Error("internal: carve shard overlaps an earlier cover");

    // The piece is Int(union of shards) on an arrangement cut only at the
    // shard coordinates; the union of shards is a face union there, so the
    // interior is exact and the result canonical.
    std::vector<std::vector<Rational>> cuts(d);
    for (int a = 0; a < d; ++a) {
      cuts[a].push_back(Rational(0));
      cuts[a].push_back(Rational(1));
    }
    for (const auto& s : shards)
      for (int a = 0; a < d; ++a) {
        cuts[a].push_back(grid.vals[a][s.lo[a]]);
        cuts[a].push_back(grid.vals[a][s.hi[a]]);
      }
    for (int a = 0; a < d; ++a) {
      std::sort(cuts[a].begin(), cuts[a].end());
      cuts[a].erase(std::unique(cuts[a].begin(), cuts[a].end()),
                    cuts[a].end());
    }
    ArrangementPtr parr = Arrangement::from_cuts(d, std::move(cuts));

    Bitset clbits(static_cast<size_t>(parr->face_count()));
    int32_t lo[3], hi[3];
    for (const auto& s : shards) {
      for (int a = 0; a < d; ++a) {
        lo[a] = parr->locate_axis(a, grid.vals[a][s.lo[a]]);
        hi[a] = parr->locate_axis(a, grid.vals[a][s.hi[a]]);
      }
      for_each_face_in_range(*parr, lo, hi, [&](int64_t f) {
        clbits.set(static_cast<size_t>(f));
        return true;
      });
    }
    Bitset piece = parr->interior(clbits);
    if (!piece.any())
      throw Error("internal: carve shards with empty interior");

    // Frontier containment: Fr piece ⊆ Fr tile ∪ ⋃_{j<=i} Fr covers[j].
    // (Later covers cannot carry this piece's frontier.) Whole-face shell
    // tests settle almost every face; the partition fallback is exact. All
    // of it runs on ranks: every piece cut is a grid value, since the piece
    // cuts are shard coordinates plus 0 and 1 and the grid interns both.
    Bitset fr = parr->closure(piece) - piece;
    std::array<std::vector<int32_t>, 3> prank;
    for (int a = 0; a < d; ++a) {
      prank[a].resize(parr->cuts[a].size());
      for (size_t k = 0; k < parr->cuts[a].size(); ++k)
        prank[a][k] = grid.rank(a, parr->cuts[a][k]);
    }
    int32_t itf[3], frlo[3], frhi[3];
    for (auto f = fr.find_first(); f != Bitset::npos; f = fr.find_next(f)) {
      parr->decode(static_cast<int64_t>(f), itf);
      for (int a = 0; a < d; ++a) {
        if (itf[a] & 1) {
          frlo[a] = prank[a][(itf[a] - 1) >> 1];
          frhi[a] = prank[a][(itf[a] + 1) >> 1];
        } else {
          frlo[a] = frhi[a] = prank[a][itf[a] >> 1];
        }
      }
      bool ok = false;
      for (size_t j = 0; j <= i && !ok; ++j)
        ok = rank_in_frontier(d, grid, cov[j], frlo, frhi);
      if (!ok)
        ok = face_in_allowed_frontiers_rank(d, grid, frlo, frhi, tile, tcells,
                                            cov, i);
      if (!ok)
        throw Error("internal: carve frontier outside allowed boundaries");
    }

    out.push_back(
        {static_cast<int64_t>(i), RoSet{parr, std::move(piece)}.compressed()});
  }
  return out;
}

}  // namespace

std::vector<CarvedPiece> carve_tile_reference(const RoSet& tile,
                                              const std::vector<RoSet>& covers) {
  if (tile.empty()) throw InvalidArgument("cannot carve an empty tile");
  return carve_faceset(tile, covers);
}

std::vector<CarvedPiece> carve_tile(const RoSet& tile,
                                    const std::vector<RoSet>& covers) {
  if (tile.empty()) throw InvalidArgument("cannot carve an empty tile");
  std::vector<Box> boxes;
  boxes.reserve(covers.size());
  bool all_boxes = true;
  for (const auto& c : covers) {
    if (c.dim() != tile.dim()) throw InvalidArgument("cover dimension mismatch");
    auto cells = c.full_cells();
    // A canonical set with one full cell is that cell's box denotation.
    if (cells.size() != 1) {
      all_boxes = false;
      break;
    }
    boxes.push_back(std::move(cells[0]));
  }
  if (all_boxes) return carve_rankspace(tile, boxes);
  return carve_faceset(tile, covers);
}

Tiling refine_tile(const Tiling& tiling, size_t tile_index,
                   const std::vector<IndexedCover>& covers,
                   std::vector<CarvedPiece>* pieces_out) {
  if (tile_index >= tiling.tiles.size())
    throw InvalidArgument("tile index out of range");
  std::set<int64_t> fresh;
  for (const auto& c : covers) {
    if (tiling.budget.count(c.index))
      throw IndexCollision("cover index " + std::to_string(c.index) +
                           " is already in the budget");
    if (!fresh.insert(c.index).second)
      throw IndexCollision("cover index " + std::to_string(c.index) +
                           " is repeated");
  }
  std::vector<RoSet> sets;
  sets.reserve(covers.size());
  for (const auto& c : covers) sets.push_back(c.set);
  auto pieces = carve_tile(tiling.tiles[tile_index], sets);

  Tiling out;
  out.budget = tiling.budget;
  out.budget.insert(fresh.begin(), fresh.end());
  out.tiles.reserve(tiling.tiles.size() + pieces.size() - 1);
  for (size_t t = 0; t < tiling.tiles.size(); ++t) {
    if (t == tile_index) {
      for (const auto& p : pieces) out.tiles.push_back(p.part);
    } else {
      out.tiles.push_back(tiling.tiles[t]);
    }
  }
  if (pieces_out) *pieces_out = std::move(pieces);
  return out;
}

TilingReport check_tiling(const Tiling& tiling, const BaseFamily* base) {
  TilingReport rep;
  auto fail = [&](std::string what, std::string witness) {
    rep.ok = false;
    rep.what = std::move(what);
    rep.witness_face = std::move(witness);
    return rep;
  };
  if (tiling.tiles.empty()) return fail("tiling has no tiles", "");
  const int d = tiling.tiles[0].dim();
  for (const auto& t : tiling.tiles)
    if (t.dim() != d) return fail("tile dimension mismatch", "");
  if (base) {
    for (int64_t i : tiling.budget)
      if (i < 0 || i >= base->size())
        return fail("budget index out of range", std::to_string(i));
  }

  std::vector<Box> budget_boxes;
  if (base)
    for (int64_t i : tiling.budget) budget_boxes.push_back(base->box(i));
  ArrangementPtr fine =
      merge_all(tiling.tiles[0], tiling.tiles, base ? &budget_boxes : nullptr);
  if (fine->face_count() > kMaxCheckFaces)
    throw GuardExceeded("tiling check arrangement too large");
  const auto nf = static_cast<size_t>(fine->face_count());

  Bitset seen(nf), cl_union(nf);
  std::vector<uint16_t> cl_count(base ? nf : 0, 0);
  for (size_t t = 0; t < tiling.tiles.size(); ++t) {
    const RoSet& u = tiling.tiles[t];
    if (u.empty()) return fail("empty tile", "tile " + std::to_string(t));
    if (u.arr->regularized(u.faces) != u.faces)
      return fail("tile is not canonical", "tile " + std::to_string(t));
    Bitset tb = u.faces_on(*fine);
    Bitset both = tb & seen;
    if (both.any())
      return fail("tiles overlap",
                  fine->face_string(static_cast<int64_t>(both.find_first())));
    seen |= tb;
    Bitset tcl = fine->closure(tb);
    if (base)
      for (auto f = tcl.find_first(); f != Bitset::npos; f = tcl.find_next(f))
        ++cl_count[f];
    cl_union |= tcl;
  }
  if (!cl_union.all()) {
    Bitset missing = ~cl_union;
    return fail("tile closures do not cover the cube",
                fine->face_string(static_cast<int64_t>(missing.find_first())));
  }

  if (base) {
    std::vector<uint16_t> fr_count(nf, 0);
    for (int64_t i : tiling.budget) {
      Box b = base->box(i);
      Bitset frb = fine->box_closure_faces(b) - fine->box_faces(b);
      for (auto f = frb.find_first(); f != Bitset::npos; f = frb.find_next(f))
        ++fr_count[f];
    }
    for (size_t f = 0; f < nf; ++f) {
      if (cl_count[f] >= 1 &&
          static_cast<int>(cl_count[f]) - 1 > static_cast<int>(fr_count[f]))
        return fail("frontier budget exceeded",
                    fine->face_string(static_cast<int64_t>(f)));
    }
  }
  return rep;
}

}  // namespace tileres
