#include "tileres/tower.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <string>

#include "carve_internal.hpp"
#include "tileres/errors.hpp"

namespace tileres {

namespace cd = carvedetail;

namespace {

std::string tile_desc(int level, int32_t t, const RoSet& tile) {
  std::string s =
      "level " + std::to_string(level) + " tile " + std::to_string(t);
  std::vector<Rational> lo, hi;
  if (tile.extent(lo, hi)) {
    s += " with extent ";
    for (int a = 0; a < tile.dim(); ++a) {
      if (a) s += " x ";
      s += "(" + rational_string(lo[a]) + "," + rational_string(hi[a]) + ")";
    }
  }
  return s;
}

}  // namespace

Rational default_schedule(int k) {
  if (k == 0) return Rational(2);
  Rational r(1);
  for (int i = 0; i < k; ++i) r /= 2;
  return r;
}

Tower build_tower(const BaseFamily& base, int K, std::vector<Rational> schedule,
                  const TowerOptions& opt) {
  if (K < 0) throw InvalidArgument("tower depth must be nonnegative");
  if (base.d < 1 || base.d > 3)
    throw InvalidArgument("tower dimension must be 1, 2 or 3");
  const int d = base.d;

  BaseCheck bc = check_base_property(base);
  if (!bc.ok) {
    std::string msg = "base fails the frontier order property";
    if (!bc.witness_indices.empty()) {
      msg += " (elements";
      for (int64_t i : bc.witness_indices) msg += " " + std::to_string(i);
      msg += " share a frontier point)";
    }
    throw InvalidArgument(msg);
  }

  if (schedule.empty())
    for (int k = 0; k <= K; ++k) schedule.push_back(default_schedule(k));
  if (static_cast<int>(schedule.size()) != K + 1)
    throw InvalidArgument("schedule must have one bound per level");

  Tower tw;
  tw.d = d;
  tw.schedule = schedule;
  Tiling root;
  root.tiles = {ro_whole(d)};
  tw.levels.push_back(std::move(root));
  tw.parent.emplace_back();
  if (!(tw.levels[0].tiles[0].diameter() < schedule[0]))
    throw InvalidArgument("schedule[0] must exceed the cube diameter");

  for (int k = 0; k < K; ++k) {
    const Tiling& cur = tw.levels[static_cast<size_t>(k)];
    const Rational& bound = schedule[static_cast<size_t>(k) + 1];
    const auto nt = static_cast<int32_t>(cur.tiles.size());

    // Allocation pass: deterministic and sequential. For each tile in index
    // order, scan the base elements of diameter < bound ascending and keep
    // every fresh one meeting the tile closure until the closure is covered.
    // The shared `used` set keeps the per-tile index sets pairwise disjoint.
    std::set<int64_t> used(cur.budget);
    std::vector<std::vector<int64_t>> chosen(static_cast<size_t>(nt));
    std::vector<int64_t> cand;
    for (int32_t t = 0; t < nt; ++t) {
      const RoSet& tile = cur.tiles[static_cast<size_t>(t)];
      std::vector<Rational> lo, hi;
      if (!tile.extent(lo, hi))
        throw Error("internal: empty tile in tower level");
      std::vector<std::array<Rational, 2>> iv(static_cast<size_t>(d));
      for (int a = 0; a < d; ++a) iv[static_cast<size_t>(a)] = {lo[a], hi[a]};
      const Box hull = make_box(std::move(iv));
      cand.clear();
      base.candidates(hull, bound, cand);

      const auto cells = tile.full_cells();
      std::vector<Box> cboxes;
      cboxes.reserve(cand.size());
      for (int64_t i : cand) cboxes.push_back(base.box(i));
      const cd::RankGrid grid = cd::make_grid(d, cells, cboxes);
      std::vector<cd::RankBox> rcells(cells.size());
      for (size_t c = 0; c < cells.size(); ++c)
        rcells[c] = cd::to_rank(grid, cells[c]);

      std::vector<cd::RankBox> uncovered = rcells;
      auto& f_t = chosen[static_cast<size_t>(t)];
      for (size_t ci = 0; ci < cand.size() && !uncovered.empty(); ++ci) {
        if (used.count(cand[ci])) continue;
        const cd::RankBox rb = cd::to_rank(grid, cboxes[ci]);
        bool meets = false;
        for (const auto& rc : rcells)
          if (cd::meets_open(grid, rc, rb, d)) {
            meets = true;
            break;
          }
        if (!meets) continue;
        f_t.push_back(cand[ci]);
        used.insert(cand[ci]);
        cd::subtract_open(uncovered, rb, d, grid);
      }
      if (!uncovered.empty())
        throw BaseExhausted(
            "base has no fresh elements of diameter below " +
                rational_string(bound) + " left to cover " +
                cd::shard_string(grid,
                                 uncovered[cd::max_dim_shard(uncovered, d)]),
            tile_desc(k, t, tile));
    }

    // Carve pass: pure per-tile work, safe to run concurrently. Results are
    // slotted by tile index, so the level is identical for any job count.
    std::vector<std::vector<CarvedPiece>> results(static_cast<size_t>(nt));
    std::vector<std::exception_ptr> errs(static_cast<size_t>(nt));
#pragma omp parallel for schedule(dynamic, 1) \
    num_threads(std::max(1, opt.jobs))
    for (int32_t t = 0; t < nt; ++t) {
      try {
        std::vector<RoSet> covers;
        covers.reserve(chosen[static_cast<size_t>(t)].size());
        for (int64_t idx : chosen[static_cast<size_t>(t)])
          covers.push_back(base.element(idx));
        results[static_cast<size_t>(t)] =
            carve_tile(cur.tiles[static_cast<size_t>(t)], covers);
      } catch (...) {
        errs[static_cast<size_t>(t)] = std::current_exception();
      }
    }
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);

    Tiling next;
    next.budget = cur.budget;
    std::vector<int32_t> par;
    for (int32_t t = 0; t < nt; ++t) {
      next.budget.insert(chosen[static_cast<size_t>(t)].begin(),
                         chosen[static_cast<size_t>(t)].end());
      RefinementStep step;
      step.level = k;
      step.parent = t;
      step.chosen = std::move(chosen[static_cast<size_t>(t)]);
      for (auto& p : results[static_cast<size_t>(t)]) {
        if (!(p.part.diameter() < bound))
          throw Error("internal: tower piece exceeds the level bound");
        if (p.part.arr->regularized(p.part.faces) != p.part.faces)
          throw Error("internal: tower piece is not canonical");
        step.children.push_back(static_cast<int32_t>(next.tiles.size()));
        step.child_slots.push_back(p.slot);
        next.tiles.push_back(std::move(p.part));
        par.push_back(t);
      }
      tw.steps.push_back(std::move(step));
    }
    tw.levels.push_back(std::move(next));
    tw.parent.push_back(std::move(par));

    if (opt.check_levels) {
      try {
        TilingReport rep = check_tiling(tw.levels.back(), &base);
        if (!rep.ok)
          throw Error("internal: level " + std::to_string(k + 1) +
                      " violates the tiling invariant: " + rep.what + " at " +
                      rep.witness_face);
      } catch (const GuardExceeded&) {
        // Level too large for the merged-arrangement check. Disjointness and
        // closure-cover still hold structurally (children partition their
        // parent and parents partition X), and the sweep verifiers re-check
        // the budget property face by face.
      }
    }
  }
  return tw;
}

}  // namespace tileres
