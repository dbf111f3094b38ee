#pragma once

#include <boost/dynamic_bitset.hpp>

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "tileres/box.hpp"

namespace tileres {

using Bitset = boost::dynamic_bitset<uint64_t>;

struct Arrangement;
using ArrangementPtr = std::shared_ptr<const Arrangement>;

// Largest face count for which whole-arrangement bitsets may be allocated.
// Larger arrangements stay index-only; sweeps over them must go through the
// region walker instead of direct enumeration.
constexpr int64_t kMaxEnumerableFaces = int64_t(1) << 26;

// One face of an axis-aligned arrangement of the unit cube, identified by one
// item per axis. Over m cuts c_0 < ... < c_{m-1} on an axis (c_0 = 0,
// c_{m-1} = 1):
//   item 2i   : the cut point {c_i}
//   item 2i+1 : the open interval (c_i, c_{i+1})
// An axis has 2m-1 items; faces are products, one item per axis, and they
// partition the closed cube. Dimension = number of interval axes. The closure
// of a face weakens each interval item to itself plus its two bounding cuts.
struct Face {
  std::array<int32_t, 3> item{};
  int d = 0;
  int64_t id = -1;

  int dim() const {
    int k = 0;
    for (int a = 0; a < d; ++a) k += item[a] & 1;
    return k;
  }
  bool axis_is_cut(int a) const { return (item[a] & 1) == 0; }
  int32_t cut_index(int a) const { return item[a] >> 1; }
  int32_t interval_index(int a) const { return (item[a] - 1) >> 1; }
};

struct Arrangement {
  int d = 0;
  std::vector<std::vector<Rational>> cuts;  // per axis; sorted, unique, 0 first, 1 last
  std::array<int32_t, 3> items{};           // per axis: 2*cuts-1
  std::array<int64_t, 3> stride{};
  int64_t nfaces = 0;

  int64_t face_count() const { return nfaces; }
  int64_t axis_item_count(int a) const { return items[a]; }

  void decode(int64_t f, int32_t* it) const {
    for (int a = 0; a < d; ++a) {
      it[a] = static_cast<int32_t>((f / stride[a]) % items[a]);
    }
  }
  int64_t encode(const int32_t* it) const {
    int64_t f = 0;
    for (int a = 0; a < d; ++a) f += int64_t(it[a]) * stride[a];
    return f;
  }
  Face face(int64_t f) const {
    Face v;
    v.d = d;
    v.id = f;
    decode(f, v.item.data());
    return v;
  }
  int face_dim(int64_t f) const {
    int32_t it[3];
    decode(f, it);
    int k = 0;
    for (int a = 0; a < d; ++a) k += it[a] & 1;
    return k;
  }

  static bool item_is_cut(int32_t it) { return (it & 1) == 0; }
  const Rational& cut_value(int a, int32_t cut_index) const { return cuts[a][cut_index]; }
  // For an interval item t, the bounding cut indices are (t-1)/2 and (t+1)/2.

  // f lies in the closure of g (single faces): per axis either equal items or
  // g is an interval and f one of its bounding cuts.
  bool face_le(int64_t f, int64_t g) const;

  // f lies in the closure of the union of s.
  bool face_in_closure(int64_t f, const Bitset& s) const;

  std::vector<Rational> face_centroid(int64_t f) const;
  void face_extent(int64_t f, std::vector<Rational>& lo, std::vector<Rational>& hi) const;
  std::string face_string(int64_t f) const;

  int32_t locate_axis(int a, const Rational& v) const;  // item containing v
  int64_t locate(const std::vector<Rational>& x) const;

  // Exact set-level topology relative to X, as maps on face sets.
  Bitset closure(const Bitset& s) const;
  Bitset interior(const Bitset& s) const;
  Bitset regularized(const Bitset& s) const;

  // Member faces of a box denotation / its closure. Facet coordinates must
  // already appear among the cuts.
  Bitset box_faces(const Box& b) const;
  Bitset box_closure_faces(const Box& b) const;

  bool same_cuts(const Arrangement& o) const { return d == o.d && cuts == o.cuts; }

  static ArrangementPtr from_cuts(int d, std::vector<std::vector<Rational>> cuts);
  // Cuts at 0, 1, and every facet coordinate of the boxes.
  static ArrangementPtr from_boxes(int d, const std::vector<Box>& boxes);
};

// Per-axis map from the items of a finer arrangement onto the items of a
// coarser one whose cuts are a subset.
struct LiftMap {
  std::vector<std::vector<int32_t>> axis;  // [a][fine_item] -> coarse_item
};

// Smallest common refinement of two arrangements (union of cuts per axis),
// with item maps from it back onto each operand.
ArrangementPtr merge_arrangements(const Arrangement& a, const Arrangement& b,
                                  LiftMap* map_a, LiftMap* map_b);

// Map of `fine` items onto `coarse` items; requires coarse cuts to be a
// subset of fine cuts per axis.
LiftMap make_lift_map(const Arrangement& fine, const Arrangement& coarse);

// Pull a face set on `coarse` up to `fine`: a fine face is a member iff the
// coarse face containing it is.
Bitset lift_faces(const Arrangement& fine, const LiftMap& map, const Bitset& coarse_bits);

// Push a face set on `fine` down to the sub-arrangement `coarse`; every
// coarse face must be homogeneous in `fine_bits` (the caller guarantees no
// structure is carried by the dropped cuts). Verified when `check` is true.
Bitset restrict_faces(const Arrangement& fine, const Arrangement& coarse,
                      const Bitset& fine_bits, bool check);

// Iterate the item subgrid [lo[a], hi[a]] (inclusive) of an arrangement,
// visiting face ids. Callback returns false to stop early; the function
// returns false iff stopped.
template <typename Fn>
bool for_each_face_in_range(const Arrangement& arr, const int32_t* lo, const int32_t* hi,
                            Fn&& fn) {
  int32_t it[3];
  for (int a = 0; a < arr.d; ++a) {
    if (lo[a] > hi[a]) return true;
    it[a] = lo[a];
  }
  for (;;) {
    if (!fn(arr.encode(it))) return false;
    int a = 0;
    for (; a < arr.d; ++a) {
      if (it[a] < hi[a]) {
        ++it[a];
        break;
      }
      it[a] = lo[a];
    }
    if (a == arr.d) return true;
  }
}

}  // namespace tileres
