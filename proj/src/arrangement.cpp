#include "tileres/arrangement.hpp"

#include <algorithm>

#include "tileres/errors.hpp"

namespace tileres {

namespace {

void check_dim(int d) {
  if (d < 1 || d > 3) throw InvalidArgument("dimension must be 1, 2, or 3");
}

}  // namespace

ArrangementPtr Arrangement::from_cuts(int d, std::vector<std::vector<Rational>> cuts) {
  check_dim(d);
  if (static_cast<int>(cuts.size()) != d) throw InvalidArgument("cut lists / dimension mismatch");
  auto arr = std::make_shared<Arrangement>();
  arr->d = d;
  for (const auto& c : cuts) {
    if (c.empty() || c.front() != 0 || c.back() != 1) {
      throw InvalidArgument("axis cuts must start at 0 and end at 1");
    }
    for (size_t i = 1; i < c.size(); ++i) {
      if (!(c[i - 1] < c[i])) throw InvalidArgument("axis cuts must be strictly increasing");
    }
  }
  arr->cuts = std::move(cuts);
  int64_t n = 1;
  for (int a = 0; a < d; ++a) {
    arr->items[a] = static_cast<int32_t>(2 * arr->cuts[a].size() - 1);
    arr->stride[a] = n;
    n *= arr->items[a];
  }
  arr->nfaces = n;
  return arr;
}

ArrangementPtr Arrangement::from_boxes(int d, const std::vector<Box>& boxes) {
  check_dim(d);
  std::vector<std::vector<Rational>> cuts(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) cuts[a] = {Rational(0), Rational(1)};
  for (const Box& b : boxes) {
    if (b.dim() != d) throw InvalidArgument("box dimension mismatch");
    for (int a = 0; a < d; ++a) {
      if (b.lo(a) < 0 || b.hi(a) > 1) throw InvalidArgument("box coordinate outside [0,1]");
      cuts[a].push_back(b.lo(a));
      cuts[a].push_back(b.hi(a));
    }
  }
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return from_cuts(d, std::move(cuts));
}

bool Arrangement::face_le(int64_t f, int64_t g) const {
  int32_t fi[3], gi[3];
  decode(f, fi);
  decode(g, gi);
  for (int a = 0; a < d; ++a) {
    if (fi[a] == gi[a]) continue;
    if ((gi[a] & 1) && (fi[a] == gi[a] - 1 || fi[a] == gi[a] + 1)) continue;
    return false;
  }
  return true;
}

bool Arrangement::face_in_closure(int64_t f, const Bitset& s) const {
  // Star of f: per axis, a cut item extends to its adjacent intervals.
  int32_t fi[3];
  decode(f, fi);
  int32_t lo[3], hi[3];
  for (int a = 0; a < d; ++a) {
    if (fi[a] & 1) {
      lo[a] = hi[a] = fi[a];
    } else {
      lo[a] = std::max<int32_t>(0, fi[a] - 1);
      hi[a] = std::min<int32_t>(items[a] - 1, fi[a] + 1);
    }
  }
  bool found = false;
  for_each_face_in_range(*this, lo, hi, [&](int64_t g) {
    if (s.test(static_cast<size_t>(g))) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

std::vector<Rational> Arrangement::face_centroid(int64_t f) const {
  int32_t it[3];
  decode(f, it);
  std::vector<Rational> x(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    if (it[a] & 1) {
      x[a] = (cuts[a][(it[a] - 1) >> 1] + cuts[a][(it[a] + 1) >> 1]) / 2;
    } else {
      x[a] = cuts[a][it[a] >> 1];
    }
  }
  return x;
}

void Arrangement::face_extent(int64_t f, std::vector<Rational>& lo,
                              std::vector<Rational>& hi) const {
  int32_t it[3];
  decode(f, it);
  lo.resize(static_cast<size_t>(d));
  hi.resize(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    if (it[a] & 1) {
      lo[a] = cuts[a][(it[a] - 1) >> 1];
      hi[a] = cuts[a][(it[a] + 1) >> 1];
    } else {
      lo[a] = hi[a] = cuts[a][it[a] >> 1];
    }
  }
}

std::string Arrangement::face_string(int64_t f) const {
  int32_t it[3];
  decode(f, it);
  std::string s;
  for (int a = 0; a < d; ++a) {
    if (a) s += " x ";
    if (it[a] & 1) {
      s += "(" + rational_string(cuts[a][(it[a] - 1) >> 1]) + "," +
           rational_string(cuts[a][(it[a] + 1) >> 1]) + ")";
    } else {
      s += "{" + rational_string(cuts[a][it[a] >> 1]) + "}";
    }
  }
  return s;
}

int32_t Arrangement::locate_axis(int a, const Rational& v) const {
  if (v < 0 || v > 1) throw InvalidArgument("point coordinate outside [0,1]");
  const auto& c = cuts[a];
  auto it = std::lower_bound(c.begin(), c.end(), v);
  auto i = static_cast<int32_t>(it - c.begin());
  if (it != c.end() && *it == v) return 2 * i;
  return 2 * i - 1;
}

int64_t Arrangement::locate(const std::vector<Rational>& x) const {
  if (static_cast<int>(x.size()) != d) throw InvalidArgument("point dimension mismatch");
  int32_t it[3];
  for (int a = 0; a < d; ++a) it[a] = locate_axis(a, x[a]);
  return encode(it);
}

Bitset Arrangement::closure(const Bitset& s) const {
  // Closure is separable: dilate interval items onto their bounding cuts one
  // axis at a time.
  Bitset cur = s;
  for (int a = 0; a < d; ++a) {
    Bitset next = cur;
    const int64_t st = stride[a];
    const int64_t m = items[a];
    for (size_t f = cur.find_first(); f != Bitset::npos; f = cur.find_next(f)) {
      int64_t t = (static_cast<int64_t>(f) / st) % m;
      if (t & 1) {
        next.set(f - static_cast<size_t>(st));
        next.set(f + static_cast<size_t>(st));
      }
    }
    cur.swap(next);
  }
  return cur;
}

Bitset Arrangement::interior(const Bitset& s) const { return ~closure(~s); }

Bitset Arrangement::regularized(const Bitset& s) const { return interior(closure(s)); }

namespace {

// Per-axis allowed-item ranges of a box denotation. Items strictly inside
// (lo,hi) are allowed, plus the endpoint cuts absorbed at the cube boundary.
// With closure=true, both endpoint cuts are allowed.
void box_axis_range(const Arrangement& arr, const Box& b, int a, bool closure, int32_t& lo_it,
                    int32_t& hi_it) {
  const auto& c = arr.cuts[a];
  auto lo_pos = std::lower_bound(c.begin(), c.end(), b.lo(a));
  auto hi_pos = std::lower_bound(c.begin(), c.end(), b.hi(a));
  if (lo_pos == c.end() || *lo_pos != b.lo(a) || hi_pos == c.end() || *hi_pos != b.hi(a)) {
    throw InvalidArgument("box facet coordinate is not a cut of this arrangement");
  }
  auto li = static_cast<int32_t>(lo_pos - c.begin());
  auto hi = static_cast<int32_t>(hi_pos - c.begin());
  lo_it = 2 * li + 1;
  hi_it = 2 * hi - 1;
  if (closure || b.lo(a) == 0) --lo_it;
  if (closure || b.hi(a) == 1) ++hi_it;
}

}  // namespace

Bitset Arrangement::box_faces(const Box& b) const {
  if (b.dim() != d) throw InvalidArgument("box dimension mismatch");
  Bitset out(static_cast<size_t>(nfaces));
  int32_t lo[3], hi[3];
  for (int a = 0; a < d; ++a) box_axis_range(*this, b, a, false, lo[a], hi[a]);
  for_each_face_in_range(*this, lo, hi, [&](int64_t f) {
    out.set(static_cast<size_t>(f));
    return true;
  });
  return out;
}

Bitset Arrangement::box_closure_faces(const Box& b) const {
  if (b.dim() != d) throw InvalidArgument("box dimension mismatch");
  Bitset out(static_cast<size_t>(nfaces));
  int32_t lo[3], hi[3];
  for (int a = 0; a < d; ++a) box_axis_range(*this, b, a, true, lo[a], hi[a]);
  for_each_face_in_range(*this, lo, hi, [&](int64_t f) {
    out.set(static_cast<size_t>(f));
    return true;
  });
  return out;
}

namespace {

std::vector<Rational> merge_axis_cuts(const std::vector<Rational>& a,
                                      const std::vector<Rational>& b) {
  std::vector<Rational> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// fine item -> coarse item for one axis; coarse cuts a subset of fine cuts.
std::vector<int32_t> axis_item_map(const std::vector<Rational>& fine,
                                   const std::vector<Rational>& coarse) {
  std::vector<int32_t> map(2 * fine.size() - 1);
  size_t j = 0;  // coarse cut position with coarse[j] >= fine[i]
  for (size_t i = 0; i < fine.size(); ++i) {
    while (j < coarse.size() && coarse[j] < fine[i]) ++j;
    if (j < coarse.size() && coarse[j] == fine[i]) {
      map[2 * i] = static_cast<int32_t>(2 * j);
    } else {
      map[2 * i] = static_cast<int32_t>(2 * j - 1);
    }
    if (2 * i + 1 < map.size()) {
      // Interval (fine[i], fine[i+1]) lies in the coarse interval right of
      // coarse[j] when coarse[j] == fine[i], else in the same interval as
      // fine[i].
      if (j < coarse.size() && coarse[j] == fine[i]) {
        map[2 * i + 1] = static_cast<int32_t>(2 * j + 1);
      } else {
        map[2 * i + 1] = static_cast<int32_t>(2 * j - 1);
      }
    }
  }
  return map;
}

}  // namespace

LiftMap make_lift_map(const Arrangement& fine, const Arrangement& coarse) {
  if (fine.d != coarse.d) throw InvalidArgument("lift map dimension mismatch");
  LiftMap m;
  m.axis.resize(static_cast<size_t>(fine.d));
  for (int a = 0; a < fine.d; ++a) {
    if (!std::includes(fine.cuts[a].begin(), fine.cuts[a].end(), coarse.cuts[a].begin(),
                       coarse.cuts[a].end())) {
      throw InvalidArgument("lift map requires a sub-arrangement");
    }
    m.axis[a] = axis_item_map(fine.cuts[a], coarse.cuts[a]);
  }
  return m;
}

ArrangementPtr merge_arrangements(const Arrangement& a, const Arrangement& b, LiftMap* map_a,
                                  LiftMap* map_b) {
  if (a.d != b.d) throw InvalidArgument("merge dimension mismatch");
  std::vector<std::vector<Rational>> cuts(static_cast<size_t>(a.d));
  for (int ax = 0; ax < a.d; ++ax) cuts[ax] = merge_axis_cuts(a.cuts[ax], b.cuts[ax]);
  ArrangementPtr fine = Arrangement::from_cuts(a.d, std::move(cuts));
  if (map_a) *map_a = make_lift_map(*fine, a);
  if (map_b) *map_b = make_lift_map(*fine, b);
  return fine;
}

Bitset lift_faces(const Arrangement& fine, const LiftMap& map, const Bitset& coarse_bits) {
  if (fine.nfaces > kMaxEnumerableFaces) throw GuardExceeded("arrangement too large to lift");
  Bitset out(static_cast<size_t>(fine.nfaces));
  int32_t it[3] = {0, 0, 0};
  // Odometer over fine faces carrying the mapped coarse id incrementally.
  const int dd = fine.d;
  int64_t coarse_stride[3];
  {
    int64_t s = 1;
    for (int a = 0; a < dd; ++a) {
      coarse_stride[a] = s;
      s *= int64_t(map.axis[a].back()) + 1;  // last fine item maps to last coarse item
    }
  }
  int64_t cid = 0;
  for (int a = 0; a < dd; ++a) cid += int64_t(map.axis[a][0]) * coarse_stride[a];
  for (int64_t f = 0;; ++f) {
    if (coarse_bits.test(static_cast<size_t>(cid))) out.set(static_cast<size_t>(f));
    int a = 0;
    for (; a < dd; ++a) {
      cid -= int64_t(map.axis[a][static_cast<size_t>(it[a])]) * coarse_stride[a];
      if (it[a] + 1 < fine.items[a]) {
        ++it[a];
        cid += int64_t(map.axis[a][static_cast<size_t>(it[a])]) * coarse_stride[a];
        break;
      }
      it[a] = 0;
      cid += int64_t(map.axis[a][0]) * coarse_stride[a];
    }
    if (a == dd) break;
  }
  return out;
}

Bitset restrict_faces(const Arrangement& fine, const Arrangement& coarse, const Bitset& fine_bits,
                      bool check) {
  LiftMap map = make_lift_map(fine, coarse);
  Bitset out(static_cast<size_t>(coarse.nfaces));
  // Representative fine item per coarse item: the unique fine item of equal
  // value for cuts, the leftmost contained fine interval for intervals.
  std::vector<std::vector<int32_t>> rep(static_cast<size_t>(fine.d));
  for (int a = 0; a < fine.d; ++a) {
    rep[a].assign(static_cast<size_t>(coarse.items[a]), -1);
    for (int32_t t = 0; t < fine.items[a]; ++t) {
      int32_t ct = map.axis[a][static_cast<size_t>(t)];
      if ((ct & 1) && !(t & 1)) continue;  // intervals represent intervals
      if (rep[a][static_cast<size_t>(ct)] < 0) rep[a][static_cast<size_t>(ct)] = t;
    }
  }
  int32_t cit[3] = {0, 0, 0};
  for (int64_t cf = 0; cf < coarse.nfaces; ++cf) {
    int32_t fit[3];
    for (int a = 0; a < coarse.d; ++a) fit[a] = rep[a][static_cast<size_t>(cit[a])];
    out[static_cast<size_t>(cf)] = fine_bits.test(static_cast<size_t>(fine.encode(fit)));
    int a = 0;
    for (; a < coarse.d; ++a) {
      if (cit[a] + 1 < coarse.items[a]) {
        ++cit[a];
        break;
      }
      cit[a] = 0;
    }
    (void)a;
  }
  if (check) {
    Bitset back = lift_faces(fine, map, out);
    if (back != fine_bits) {
      throw InvalidArgument("face set carries structure on dropped cuts");
    }
  }
  return out;
}

}  // namespace tileres
