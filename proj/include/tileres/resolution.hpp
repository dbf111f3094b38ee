#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tileres/tower.hpp"

namespace tileres {

// A root-to-leaf path through a tower's parent forest, one tile index per
// level. Valid chains follow the parent map: tiles[k] is the parent of
// tiles[k+1]. A chain may stop short of the tower's full depth; its length
// is the localization depth plus one.
struct Chain {
  std::vector<int32_t> tiles;

  int depth() const { return static_cast<int>(tiles.size()) - 1; }
};

// Incidence profile of one face of the final arrangement. counts[k] is the
// number of level-k tiles whose closure contains the face; on an intact
// tower the counts are nondecreasing and settle at the fiber size, and
// stabilization is the first level from which they stay constant.
struct FiberReport {
  int64_t face = -1;
  std::vector<int64_t> counts;
  int stabilization = 0;
  int64_t fiber = 0;
  std::vector<int32_t> leaves;  // final-level tiles realizing the fiber
};

struct SurjectivityReport {
  bool ok = false;
  std::string what;
  std::string witness_face;
  int64_t witness = -1;  // face index on the final arrangement, -1 if ok
};

// Per-axis cut values of the common refinement below, without building it.
std::vector<std::vector<Rational>> final_cuts(const Tower& tower);

// Common refinement of the last level's tile carriers. Fibers are constant
// on its faces, so sweeping them verifies every point of the cube.
ArrangementPtr final_arrangement(const Tower& tower);

// All root-to-leaf paths, ordered by leaf index; one per final tile.
std::vector<Chain> enumerate_chains(const Tower& tower);

// Incidence counts of `face` (an index into `fine`, which must equal the
// tower's final arrangement) against every level. Tolerates towers broken
// by mutation harnesses: the fiber may then be empty or drop mid-tower.
FiberReport fiber_of_face(const Arrangement& fine, int64_t face,
                          const Tower& tower);

// The depth-|c| localization: the tight closed bounding box of the last
// tile's closure, with diameter below the schedule bound at that depth.
Box resolve_chain(const Tower& tower, const Chain& c);

// Verifies that every face of the final arrangement lies in some final
// tile's closure, i.e. that every fiber is nonempty.
SurjectivityReport surjectivity_check(const Tower& tower);

}  // namespace tileres
