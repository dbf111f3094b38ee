#pragma once

#include <cstdint>
#include <vector>

#include "tileres/roset.hpp"

// Exact point-set queries against single tiles, used by the fiber walkers.
// These work on the tile's own carrier, so the querying arrangement never
// has to refine it.

namespace tileres {
namespace facequery {

// Whether face g of `a` meets the closed box [lo, hi]. glo/ghi are scratch.
bool face_meets_box(const Arrangement& a, int64_t g,
                    const std::vector<Rational>& lo,
                    const std::vector<Rational>& hi,
                    std::vector<Rational>& glo, std::vector<Rational>& ghi);

// Whether the closed box [lo, hi] lies inside cl T. The closure is a union
// of whole carrier faces, so it suffices that no carrier face outside it
// meets the box.
bool closure_covers_box(const RoSet& t, const std::vector<Rational>& lo,
                        const std::vector<Rational>& hi);

}  // namespace facequery
}  // namespace tileres
