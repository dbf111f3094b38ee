#pragma once

#include <cstdint>
#include <vector>

#include "tileres/base_family.hpp"
#include "tileres/tiling.hpp"

namespace tileres {

// Record of one tile's refinement while building a level: the base indices
// that covered it and the children it split into. Per-face incidence data
// (which covers and which children a given face's closure memberships hit)
// is a deterministic function of these fields and is recomputed by the
// verification sweeps instead of being stored per face.
struct RefinementStep {
  int level = 0;       // level of the parent tile
  int32_t parent = 0;  // index into levels[level].tiles
  std::vector<int64_t> chosen;      // covering base indices, scan order
  std::vector<int32_t> children;    // indices into levels[level + 1].tiles
  std::vector<int64_t> child_slots;  // position of each child's cover in chosen
};

// Nested tilings of the cube with shrinking mesh. levels[0] is the single
// tile X; each later level refines the previous one tile by tile, and
// every tile at level k has diameter < schedule[k].
struct Tower {
  int d = 0;
  std::vector<Tiling> levels;
  // parent[k][t] = index in levels[k-1].tiles of the tile containing
  // levels[k].tiles[t]; parent[0] is empty.
  std::vector<std::vector<int32_t>> parent;
  std::vector<Rational> schedule;
  std::vector<RefinementStep> steps;  // level-major, parents in index order

  int depth() const { return static_cast<int>(levels.size()) - 1; }
};

// Diameter bound for level k: 2^{-k} for k >= 1. Level 0 holds the whole
// cube, whose diameter is exactly 1, so its bound is 2 rather than 2^0
// (a strict bound of 1 would reject X itself).
Rational default_schedule(int k);

struct TowerOptions {
  // Carve concurrency for each level; the tower is identical for any value.
  int jobs = 1;
  // Run check_tiling (with budget sweep) on every level that fits the
  // guard; the structural per-carve checks run regardless.
  bool check_levels = true;
};

// Build a K+1 level tower over the base. The base must pass
// check_base_property (else InvalidArgument before any construction).
// Cover selection per tile is deterministic: scan base elements of diameter
// below the level bound in index order, keep every fresh one meeting the
// tile closure until the closure is covered. Indices spent by earlier tiles
// of the same level (or recorded in the budget) are skipped, which keeps
// the per-step index sets pairwise disjoint. Throws BaseExhausted naming
// the starving tile when the scan runs out before the tile is covered.
Tower build_tower(const BaseFamily& base, int K,
                  std::vector<Rational> schedule = {},
                  const TowerOptions& opt = {});

}  // namespace tileres
