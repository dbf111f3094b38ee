#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tileres/base_family.hpp"
#include "tileres/roset.hpp"

namespace tileres {

// Finite pairwise-disjoint family of nonempty canonical sets whose closures
// cover X, plus the set of base indices consumed by refinements so far.
struct Tiling {
  std::vector<RoSet> tiles;
  std::set<int64_t> budget;
};

struct CarvedPiece {
  int64_t slot = 0;  // position in the covers list this piece came from
  RoSet part;
};

// Carve a tile along an ordered list of covering sets: piece i is the
// canonicalization of tile ∩ (covers[i] minus the closures of covers[j<i]).
// Empty pieces are dropped and `slot` keeps the original position. The
// pieces are pairwise disjoint, their closures cover the tile's closure, and
// each piece's frontier stays inside Fr tile ∪ ⋃_j Fr covers[j]; the last
// containment is asserted at runtime since regularizing the raw pieces must
// not enlarge it. Throws CoverError naming an uncovered face when
// cl tile ⊄ ⋃ covers.
//
// carve_tile dispatches to a rank-space implementation when every cover is a
// single box (the hot path; base elements always are); carve_tile_reference
// is the direct face-set computation on the common refinement of all the
// carriers, kept as the oracle the fast path is tested against.
std::vector<CarvedPiece> carve_tile(const RoSet& tile, const std::vector<RoSet>& covers);
std::vector<CarvedPiece> carve_tile_reference(const RoSet& tile,
                                              const std::vector<RoSet>& covers);

struct IndexedCover {
  int64_t index = 0;  // base index; must be fresh w.r.t. the tiling budget
  RoSet set;
};

// Replace tiles[tile_index] in place by its carved pieces (slot order); the
// budget grows by every cover index, used or not. Throws IndexCollision when
// a cover index is already budgeted (or repeated), CoverError when the
// covers miss part of the tile.
Tiling refine_tile(const Tiling& tiling, size_t tile_index,
                   const std::vector<IndexedCover>& covers,
                   std::vector<CarvedPiece>* pieces_out = nullptr);

// Decidable tiling check on the merged arrangement of every tile carrier
// (test-scale; throws GuardExceeded when that arrangement is too large):
// tiles nonempty, canonical, pairwise disjoint, closures covering X. With a
// base, additionally sweeps the frontier-budget property
//   |{T : f ⊆ cl T}| - 1 ≤ |{i ∈ budget : f ⊆ Fr B_i}|   for every face f.
struct TilingReport {
  bool ok = true;
  std::string what;          // first failure, empty when ok
  std::string witness_face;  // face or tile involved, when applicable
};
TilingReport check_tiling(const Tiling& tiling, const BaseFamily* base = nullptr);

}  // namespace tileres
