#include "face_query.hpp"

namespace tileres {
namespace facequery {

bool face_meets_box(const Arrangement& a, int64_t g,
                    const std::vector<Rational>& lo,
                    const std::vector<Rational>& hi,
                    std::vector<Rational>& glo, std::vector<Rational>& ghi) {
  a.face_extent(g, glo, ghi);
  for (int ax = 0; ax < a.d; ++ax) {
    const auto axi = static_cast<size_t>(ax);
    if (glo[axi] == ghi[axi]) {  // cut item
      if (glo[axi] < lo[axi] || hi[axi] < glo[axi]) return false;
    } else {  // open interval item
      if (!(glo[axi] < hi[axi] && lo[axi] < ghi[axi])) return false;
    }
  }
  return true;
}

bool closure_covers_box(const RoSet& t, const std::vector<Rational>& lo,
                        const std::vector<Rational>& hi) {
  const Arrangement& a = *t.arr;
  const Bitset cl = t.closure_faces();
  if (cl.all()) return true;
  std::vector<Rational> glo, ghi;
  for (int64_t g = 0; g < a.face_count(); ++g) {
    if (cl.test(static_cast<size_t>(g))) continue;
    if (face_meets_box(a, g, lo, hi, glo, ghi)) return false;
  }
  return true;
}

}  // namespace facequery
}  // namespace tileres
