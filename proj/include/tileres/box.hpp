#pragma once

#include <array>
#include <vector>

#include "tileres/rational.hpp"

namespace tileres {

// Axis-aligned box inside the unit cube. Each axis stores [lo, hi] with
// 0 <= lo < hi <= 1. The box denotes the relatively open set
//   { x in X : lo_j < x_j < hi_j, except comparisons at lo_j = 0 or
//     hi_j = 1 are dropped },
// so a side touching the cube boundary absorbs that boundary.
struct Box {
  std::vector<std::array<Rational, 2>> iv;

  int dim() const { return static_cast<int>(iv.size()); }
  const Rational& lo(int axis) const { return iv[axis][0]; }
  const Rational& hi(int axis) const { return iv[axis][1]; }

  // Max side length; distances are taken coordinatewise (sup metric).
  Rational diameter() const;

  // Relatively open membership, x assumed inside [0,1]^d.
  bool denotes_point(const std::vector<Rational>& x) const;

  // Closed-box membership cl(lo,hi) = [lo,hi] coordinatewise.
  bool closure_contains(const std::vector<Rational>& x) const;

  bool operator==(const Box& o) const { return iv == o.iv; }
};

// Validating constructor; throws InvalidArgument on a bad interval.
Box make_box(std::vector<std::array<Rational, 2>> intervals);

Box unit_box(int d);

std::string box_string(const Box& b);

}  // namespace tileres
