#include "tileres/roset.hpp"

#include <cassert>

#include "tileres/errors.hpp"

namespace tileres {

namespace {

ArrangementPtr trivial_arrangement(int d) {
  std::vector<std::vector<Rational>> cuts(static_cast<size_t>(d), {Rational(0), Rational(1)});
  return Arrangement::from_cuts(d, std::move(cuts));
}

RoSet canonical(ArrangementPtr arr, Bitset faces) {
  RoSet s;
  s.arr = std::move(arr);
  s.faces = std::move(faces);
  assert(s.faces == s.arr->regularized(s.faces));
  return s;
}

}  // namespace

bool RoSet::extent(std::vector<Rational>& lo, std::vector<Rational>& hi) const {
  if (empty()) return false;
  Bitset cl = arr->closure(faces);
  lo.assign(static_cast<size_t>(arr->d), Rational(1));
  hi.assign(static_cast<size_t>(arr->d), Rational(0));
  // Per-axis min and max item present in the closure.
  for (int a = 0; a < arr->d; ++a) {
    int32_t mn = arr->items[a], mx = -1;
    for (size_t f = cl.find_first(); f != Bitset::npos; f = cl.find_next(f)) {
      auto t = static_cast<int32_t>((static_cast<int64_t>(f) / arr->stride[a]) % arr->items[a]);
      mn = std::min(mn, t);
      mx = std::max(mx, t);
    }
    lo[a] = arr->cuts[a][static_cast<size_t>(mn) / 2];          // closure: odd t starts at cut t/2
    hi[a] = arr->cuts[a][static_cast<size_t>(mx + 1) / 2];
  }
  return true;
}

Rational RoSet::diameter() const {
  std::vector<Rational> lo, hi;
  if (!extent(lo, hi)) return Rational(0);
  Rational best = 0;
  for (size_t a = 0; a < lo.size(); ++a) best = std::max(best, Rational(hi[a] - lo[a]));
  return best;
}

std::vector<Box> RoSet::full_cells() const {
  std::vector<Box> out;
  int32_t it[3];
  for (size_t f = faces.find_first(); f != Bitset::npos; f = faces.find_next(f)) {
    arr->decode(static_cast<int64_t>(f), it);
    bool full = true;
    for (int a = 0; a < arr->d; ++a) full = full && (it[a] & 1);
    if (!full) continue;
    std::vector<std::array<Rational, 2>> iv(static_cast<size_t>(arr->d));
    for (int a = 0; a < arr->d; ++a) {
      iv[a] = {arr->cuts[a][static_cast<size_t>(it[a] - 1) / 2],
               arr->cuts[a][static_cast<size_t>(it[a] + 1) / 2]};
    }
    out.push_back(make_box(std::move(iv)));
  }
  return out;
}

RoSet RoSet::compressed() const {
  // An interior cut is load-bearing iff the open slabs on its two sides
  // disagree somewhere. For a canonical set, agreeing slabs force the cut
  // slab to match as well, so dropping the cut loses nothing (the restrict
  // below still verifies this).
  std::vector<std::vector<Rational>> kept(static_cast<size_t>(arr->d));
  bool all = true;
  for (int a = 0; a < arr->d; ++a) {
    const size_t ncuts = arr->cuts[a].size();
    kept[a].push_back(arr->cuts[a].front());
    for (size_t i = 1; i + 1 < ncuts; ++i) {
      int32_t lo[3], hi[3];
      for (int b = 0; b < arr->d; ++b) {
        lo[b] = 0;
        hi[b] = arr->items[b] - 1;
      }
      const int32_t left = static_cast<int32_t>(2 * i - 1);
      lo[a] = hi[a] = left;
      bool same = for_each_face_in_range(*arr, lo, hi, [&](int64_t f) {
        const int64_t right = f + 2 * arr->stride[a];
        return faces.test(static_cast<size_t>(f)) == faces.test(static_cast<size_t>(right));
      });
      if (!same) kept[a].push_back(arr->cuts[a][i]);
      all = all && !same;
    }
    kept[a].push_back(arr->cuts[a].back());
  }
  if (all) return *this;
  ArrangementPtr coarse = Arrangement::from_cuts(arr->d, std::move(kept));
  Bitset bits = restrict_faces(*arr, *coarse, faces, /*check=*/true);
  return canonical(std::move(coarse), std::move(bits));
}

Bitset RoSet::faces_on(const Arrangement& fine) const {
  if (fine.same_cuts(*arr)) return faces;
  return lift_faces(fine, make_lift_map(fine, *arr), faces);
}

RoSet ro_empty(int d) {
  ArrangementPtr arr = trivial_arrangement(d);
  Bitset none(static_cast<size_t>(arr->nfaces));
  return canonical(std::move(arr), std::move(none));
}

RoSet ro_whole(int d) {
  ArrangementPtr arr = trivial_arrangement(d);
  Bitset all(static_cast<size_t>(arr->nfaces));
  all.set();
  return canonical(std::move(arr), std::move(all));
}

RoSet ro_regularize(ArrangementPtr arr, const Bitset& open_faces) {
  return canonical(arr, arr->regularized(open_faces)).compressed();
}

RoSet ro_from_box(const Box& b) {
  std::vector<std::vector<Rational>> cuts(static_cast<size_t>(b.dim()));
  for (int a = 0; a < b.dim(); ++a) {
    cuts[a].push_back(Rational(0));
    if (b.lo(a) != 0) cuts[a].push_back(b.lo(a));
    if (b.hi(a) != 1) cuts[a].push_back(b.hi(a));
    cuts[a].push_back(Rational(1));
  }
  ArrangementPtr arr = Arrangement::from_cuts(b.dim(), std::move(cuts));
  Bitset faces = arr->box_faces(b);
  return canonical(std::move(arr), std::move(faces)).compressed();
}

RoSet ro_from_box_on(ArrangementPtr arr, const Box& b) {
  Bitset faces = arr->box_faces(b);
  return canonical(std::move(arr), std::move(faces));
}

namespace {

// Lift both operands onto their common refinement.
void align(const RoSet& u, const RoSet& v, ArrangementPtr& arr, Bitset& ub, Bitset& vb) {
  if (u.arr->same_cuts(*v.arr)) {
    arr = u.arr;
    ub = u.faces;
    vb = v.faces;
    return;
  }
  LiftMap mu, mv;
  arr = merge_arrangements(*u.arr, *v.arr, &mu, &mv);
  ub = lift_faces(*arr, mu, u.faces);
  vb = lift_faces(*arr, mv, v.faces);
}

}  // namespace

RoSet ro_join(const RoSet& u, const RoSet& v) {
  ArrangementPtr arr;
  Bitset ub, vb;
  align(u, v, arr, ub, vb);
  return canonical(arr, arr->regularized(ub | vb)).compressed();
}

RoSet ro_meet(const RoSet& u, const RoSet& v) {
  ArrangementPtr arr;
  Bitset ub, vb;
  align(u, v, arr, ub, vb);
  // Meets of canonical sets are canonical; regularized() here is the identity.
  return canonical(arr, ub & vb).compressed();
}

RoSet ro_complement(const RoSet& u) {
  Bitset bits = ~u.arr->closure(u.faces);
  return canonical(u.arr, std::move(bits)).compressed();
}

bool ro_equal(const RoSet& u, const RoSet& v) {
  ArrangementPtr arr;
  Bitset ub, vb;
  align(u, v, arr, ub, vb);
  return ub == vb;
}

bool ro_subset(const RoSet& u, const RoSet& v) {
  ArrangementPtr arr;
  Bitset ub, vb;
  align(u, v, arr, ub, vb);
  return ub.is_subset_of(vb);
}

bool ro_disjoint(const RoSet& u, const RoSet& v) {
  ArrangementPtr arr;
  Bitset ub, vb;
  align(u, v, arr, ub, vb);
  return !ub.intersects(vb);
}

}  // namespace tileres
