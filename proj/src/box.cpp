#include "tileres/box.hpp"

#include "tileres/errors.hpp"

namespace tileres {

Rational Box::diameter() const {
  Rational best = 0;
  for (const auto& ab : iv) {
    Rational w = ab[1] - ab[0];
    if (w > best) best = w;
  }
  return best;
}

bool Box::denotes_point(const std::vector<Rational>& x) const {
  for (int j = 0; j < dim(); ++j) {
    if (!(lo(j) == 0) && !(lo(j) < x[j])) return false;
    if (!(hi(j) == 1) && !(x[j] < hi(j))) return false;
  }
  return true;
}

bool Box::closure_contains(const std::vector<Rational>& x) const {
  for (int j = 0; j < dim(); ++j) {
    if (x[j] < lo(j) || hi(j) < x[j]) return false;
  }
  return true;
}

Box make_box(std::vector<std::array<Rational, 2>> intervals) {
  if (intervals.empty()) throw InvalidArgument("box needs at least one axis");
  for (const auto& ab : intervals) {
    if (ab[0] < 0 || ab[1] > 1 || !(ab[0] < ab[1])) {
      throw InvalidArgument("box interval violates 0 <= lo < hi <= 1: [" +
                            rational_string(ab[0]) + ", " + rational_string(ab[1]) + "]");
    }
  }
  Box b;
  b.iv = std::move(intervals);
  return b;
}

Box unit_box(int d) {
  std::vector<std::array<Rational, 2>> iv(static_cast<size_t>(d), {Rational(0), Rational(1)});
  return make_box(std::move(iv));
}

std::string box_string(const Box& b) {
  std::string s = "[";
  for (int j = 0; j < b.dim(); ++j) {
    if (j) s += " x ";
    s += "(" + rational_string(b.lo(j)) + "," + rational_string(b.hi(j)) + ")";
  }
  return s + "]";
}

}  // namespace tileres
