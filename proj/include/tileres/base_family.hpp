#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tileres/box.hpp"
#include "tileres/roset.hpp"

namespace tileres {

// One generated block of base elements: rounds of a brick grid at pitch
// `pitch` with nominal side length 9/8 of that, every endpoint jittered per
// box. Bricks on an axis overlap their neighbor by roughly an eighth of the
// pitch even after jitter, so the grid of any single round covers X with
// every point interior to some brick.
struct BaseSegment {
  int64_t first = 0;  // global index of this segment's element 0
  int64_t count = 0;  // elements (the last round may be truncated)
  Rational max_diam;  // requested bound; every element is strictly smaller
  Rational max_len;   // exact largest side length over the segment
  Rational pitch;     // nominal start of brick j is j * pitch
  Rational nominal_len;
  int d = 0;
  int32_t bricks = 0;  // bricks per axis in one round
  int64_t cells_per_round() const {
    int64_t n = 1;
    for (int a = 0; a < d; ++a) n *= bricks;
    return n;
  }
};

// Finite indexed family of open boxes standing in for a base of X = [0,1]^d.
// n is the ambient dimension bound the frontier-order property is checked
// against (= d for the unit cube).
struct BaseFamily {
  int d = 0;
  int n = 0;
  std::vector<Box> boxes;
  std::vector<BaseSegment> segments;  // empty for hand-made families

  int64_t size() const { return static_cast<int64_t>(boxes.size()); }
  const Box& box(int64_t i) const { return boxes[static_cast<size_t>(i)]; }
  RoSet element(int64_t i) const { return ro_from_box(box(i)); }

  // Indices of elements with every side < diam_bound whose closed box meets
  // the closed hull, in ascending index order.
  void candidates(const Box& hull, const Rational& diam_bound,
                  std::vector<int64_t>& out) const;
};

// Deterministic family of `count` overlapping boxes covering X, each with
// diameter < max_diam, all interior facet coordinates globally pairwise
// distinct (a counter is folded into every jitter, so equality is impossible
// by construction). Throws InvalidArgument when count cannot cover X.
BaseFamily make_base(int d, int64_t count, const Rational& max_diam, uint64_t seed);

// Concatenation with re-based indices. Verifies that interior facet
// coordinates stay globally distinct across the parts and throws
// InvalidArgument naming the colliding value otherwise.
BaseFamily merge_bases(const std::vector<BaseFamily>& parts);

// Wrap explicit boxes (tests, hand-built fixtures).
BaseFamily family_from_boxes(int d, std::vector<Box> boxes);

struct BaseCheck {
  bool ok = false;
  // Exact maximum number of element frontiers through a single point when
  // certified == false; the certified upper bound d otherwise.
  int max_order = 0;
  bool certified = false;
  std::vector<Rational> witness_point;   // set when !ok
  std::vector<int64_t> witness_indices;  // frontiers through the witness
};

// Frontier-order property: no point of X lies on n+1 element frontiers.
// Sweeps every face of the family's arrangement when that is small (the
// sweep visits every face once per element); for larger families it relies
// on the distinctness certificate (per axis, each interior facet value
// belongs to exactly one element, so a point meets at most one frontier per
// axis), falling back to the sweep while the arrangement stays enumerable.
// Throws GuardExceeded when no route applies.
BaseCheck check_base_property(const BaseFamily& f);

// The sweep half of check_base_property, always exhaustive; exposed so tests
// can cross-validate the certificate. Requires an enumerable arrangement.
BaseCheck exhaustive_frontier_order(const BaseFamily& f);

}  // namespace tileres
