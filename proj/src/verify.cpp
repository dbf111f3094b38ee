#include "tileres/verify.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tileres/errors.hpp"
#include "tileres/resolution.hpp"
#include "tileres/tiling.hpp"

namespace tileres {

namespace {

// Unbiased draw from [0, n).
uint64_t rand_below(std::mt19937_64& g, uint64_t n) {
  const uint64_t lim = std::numeric_limits<uint64_t>::max() -
                       std::numeric_limits<uint64_t>::max() % n;
  uint64_t v;
  do { v = g(); } while (v >= lim);
  return v % n;
}

// Per-face RNG stream, independent of sweep order and parallel split.
uint64_t face_stream(uint64_t seed, uint64_t tag) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr int64_t kSampleDen = int64_t(1) << 20;

std::string point_string(const std::vector<Rational>& x) {
  std::string s = "(";
  for (size_t a = 0; a < x.size(); ++a) {
    if (a) s += ", ";
    s += rational_string(x[a]);
  }
  return s + ")";
}

// `count` points inside face f: the centroid, then jittered ones. Interval
// axes take lo + (hi-lo) * j/2^20 with 0 < j < 2^20, so every point stays
// strictly between the bounds; cut axes keep the cut value exactly. Each
// point is checked to locate back to f before it is handed out.
void face_points(const Arrangement& arr, int64_t f, int count, uint64_t seed,
                 std::vector<std::vector<Rational>>& out) {
  out.clear();
  int32_t it[3];
  arr.decode(f, it);
  out.push_back(arr.face_centroid(f));
  std::mt19937_64 rng(face_stream(seed, static_cast<uint64_t>(f)));
  for (int s = 1; s < count; ++s) {
    std::vector<Rational> x(static_cast<size_t>(arr.d));
    for (int a = 0; a < arr.d; ++a) {
      if (Arrangement::item_is_cut(it[a])) {
        x[static_cast<size_t>(a)] = arr.cut_value(a, it[a] >> 1);
      } else {
        const Rational& lo = arr.cut_value(a, (it[a] - 1) >> 1);
        const Rational& hi = arr.cut_value(a, (it[a] + 1) >> 1);
        const int64_t j = 1 + static_cast<int64_t>(rand_below(rng, kSampleDen - 1));
        x[static_cast<size_t>(a)] = lo + (hi - lo) * Rational(j, kSampleDen);
      }
    }
    out.push_back(std::move(x));
  }
  for (const auto& x : out) {
    if (arr.locate(x) != f) throw Error("internal: sample point escaped its face");
  }
}

void check_point(const std::vector<Rational>& x, int d) {
  if (static_cast<int>(x.size()) != d)
    throw InvalidArgument("point dimension does not match the set");
  for (const Rational& v : x) {
    if (v < 0 || v > 1) throw InvalidArgument("point outside the unit cube");
  }
}

// ----------------------------------------------------------- the oracles ----

// A set's closed full-dimensional cells in rank space. vals[a] is sorted and
// deduplicated and always contains 0 and 1, so rank 0 is the value 0 and the
// last rank is the value 1. The table coordinates cut the cube into faces on
// which membership in cl S = union of the cells is constant. A position is
// an item pair (c, c) for the cut {vals[c]} or (c, c+1) for the open gap
// between neighbors, and a point lies in a closed cell iff its item's pair
// sits inside the cell's rank box, so everything after the per-axis
// bracketing search is integer work.
//
// membership() realizes Int cl S by probing: around x take per axis the
// offsets {-delta/2, 0, +delta/2}, where delta is the distance from x to the
// nearest other table value (offsets leaving [0,1], possible only at the
// cube boundary, are dropped). The probe grid contains exactly one point of
// every table face meeting the open delta/2-box around x, and x lies in the
// closure of each probe's face. Hence: all probes in cl S  <=>  the whole
// box is inside cl S  <=>  x in Int cl S, and the probes themselves are just
// the item pairs enumerated by axis_items.
struct OracleCtx {
  int d = 0;
  std::array<std::vector<Rational>, 3> vals;
  std::vector<std::array<int32_t, 6>> cells;

  explicit OracleCtx(const RoSet& S) {
    d = S.dim();
    const std::vector<Box> raw = S.full_cells();
    for (int a = 0; a < d; ++a) {
      auto& v = vals[static_cast<size_t>(a)];
      v.push_back(Rational(0));
      v.push_back(Rational(1));
      for (const Box& c : raw) {
        v.push_back(c.lo(a));
        v.push_back(c.hi(a));
      }
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    cells.reserve(raw.size());
    for (const Box& c : raw) {
      std::array<int32_t, 6> rb{};
      for (int a = 0; a < d; ++a) {
        rb[static_cast<size_t>(2 * a)] = rank(a, c.lo(a));
        rb[static_cast<size_t>(2 * a + 1)] = rank(a, c.hi(a));
      }
      cells.push_back(rb);
    }
  }

  int32_t rank(int a, const Rational& v) const {
    const auto& t = vals[static_cast<size_t>(a)];
    return static_cast<int32_t>(std::lower_bound(t.begin(), t.end(), v) - t.begin());
  }

  bool pair_in_cells(const int32_t* c1, const int32_t* c2) const {
    for (const auto& rb : cells) {
      bool in = true;
      for (int a = 0; a < d && in; ++a) {
        in = rb[static_cast<size_t>(2 * a)] <= c1[a] && c2[a] <= rb[static_cast<size_t>(2 * a + 1)];
      }
      if (in) return true;
    }
    return false;
  }

  // Item pairs the probe offsets land in on one axis; 1 to 3 of them.
  int axis_items(int a, const Rational& x, std::array<std::array<int32_t, 2>, 3>& out) const {
    const auto& t = vals[static_cast<size_t>(a)];
    const auto it = std::lower_bound(t.begin(), t.end(), x);
    const int32_t r = static_cast<int32_t>(it - t.begin());
    const int32_t lastr = static_cast<int32_t>(t.size()) - 1;
    if (it != t.end() && *it == x) {
      int n = 0;
      if (r > 0) out[static_cast<size_t>(n++)] = {static_cast<int32_t>(r - 1), r};
      out[static_cast<size_t>(n++)] = {r, r};
      if (r < lastr) out[static_cast<size_t>(n++)] = {r, static_cast<int32_t>(r + 1)};
      return n;
    }
    out[0] = {static_cast<int32_t>(r - 1), r};  // 0 and 1 are in the table, so 0 < r
    return 1;
  }

  bool membership(const std::vector<Rational>& x) const {
    std::array<std::array<std::array<int32_t, 2>, 3>, 3> items;
    int counts[3] = {1, 1, 1};
    for (int a = 0; a < d; ++a) {
      counts[a] = axis_items(a, x[static_cast<size_t>(a)], items[static_cast<size_t>(a)]);
    }
    int ix[3] = {0, 0, 0};
    for (;;) {
      int32_t c1[3], c2[3];
      for (int a = 0; a < d; ++a) {
        c1[a] = items[static_cast<size_t>(a)][static_cast<size_t>(ix[a])][0];
        c2[a] = items[static_cast<size_t>(a)][static_cast<size_t>(ix[a])][1];
      }
      if (!pair_in_cells(c1, c2)) return false;
      int a = 0;
      while (a < d && ++ix[a] == counts[a]) ix[a++] = 0;
      if (a == d) return true;
    }
  }

  bool closure(const std::vector<Rational>& x) const {
    int32_t c1[3], c2[3];
    for (int a = 0; a < d; ++a) {
      const auto& t = vals[static_cast<size_t>(a)];
      const auto it = std::lower_bound(t.begin(), t.end(), x[static_cast<size_t>(a)]);
      const int32_t r = static_cast<int32_t>(it - t.begin());
      if (it != t.end() && *it == x[static_cast<size_t>(a)]) {
        c1[a] = c2[a] = r;
      } else {
        c1[a] = r - 1;
        c2[a] = r;
      }
    }
    return pair_in_cells(c1, c2);
  }
};

}  // namespace

std::vector<SamplePlan> make_sample_plan(const Arrangement& arr, int per_face,
                                         uint64_t seed) {
  if (per_face < 1) throw InvalidArgument("sample plan needs at least one point per face");
  if (arr.face_count() > kMaxEnumerableFaces)
    throw GuardExceeded("arrangement too large for a per-face sample plan");
  std::vector<SamplePlan> plans(static_cast<size_t>(arr.face_count()));
  for (int64_t f = 0; f < arr.face_count(); ++f) {
    SamplePlan& p = plans[static_cast<size_t>(f)];
    p.face = f;
    face_points(arr, f, per_face, seed, p.points);
  }
  return plans;
}

bool oracle_membership(const std::vector<Rational>& x, const RoSet& S) {
  check_point(x, S.dim());
  return OracleCtx(S).membership(x);
}

bool oracle_closure(const std::vector<Rational>& x, const RoSet& S) {
  check_point(x, S.dim());
  return OracleCtx(S).closure(x);
}

bool oracle_frontier(const std::vector<Rational>& x, const RoSet& S) {
  check_point(x, S.dim());
  const OracleCtx ctx(S);
  return ctx.closure(x) && !ctx.membership(x);
}

OracleAgreement oracle_cross_check(const RoSet& S, int samples_per_face,
                                   uint64_t seed) {
  if (samples_per_face < 1)
    throw InvalidArgument("oracle cross-check needs at least one sample per face");
  const Arrangement& arr = *S.arr;
  if (arr.face_count() > kMaxEnumerableFaces)
    throw GuardExceeded("carrier too large for an exhaustive oracle sweep");
  const OracleCtx ctx(S);
  const Bitset cl = arr.closure(S.faces);
  OracleAgreement rep;
  rep.faces = arr.face_count();
  std::vector<std::vector<Rational>> pts;
  for (int64_t f = 0; f < arr.face_count(); ++f) {
    const bool can_in = S.faces.test(static_cast<size_t>(f));
    const bool can_fr = cl.test(static_cast<size_t>(f)) && !can_in;
    face_points(arr, f, samples_per_face, seed, pts);
    for (const auto& x : pts) {
      const bool om = ctx.membership(x);
      const bool ofr = ctx.closure(x) && !om;
      ++rep.samples;
      if (om != can_in || ofr != can_fr) {
        rep.ok = false;
        if (rep.witness.empty()) rep.witness = arr.face_string(f) + " at " + point_string(x);
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------- step sweeps ----

namespace {

// Closed rank-extent shell tests, same conventions as the oracle table:
// extents are [lo, hi] rank pairs per axis, rank 0 is the value 0 and
// last[a] the value 1, so absorption at the cube boundary is a rank test.
bool ext_in(int d, const int32_t* elo, const int32_t* ehi, const std::array<int32_t, 6>& B) {
  for (int a = 0; a < d; ++a) {
    if (elo[a] < B[static_cast<size_t>(2 * a)] || ehi[a] > B[static_cast<size_t>(2 * a + 1)])
      return false;
  }
  return true;
}

bool ext_disjoint(int d, const int32_t* elo, const int32_t* ehi, const std::array<int32_t, 6>& B) {
  for (int a = 0; a < d; ++a) {
    if (ehi[a] < B[static_cast<size_t>(2 * a)] || B[static_cast<size_t>(2 * a + 1)] < elo[a])
      return true;
  }
  return false;
}

bool ext_meets_open(int d, const int32_t* elo, const int32_t* ehi,
                    const std::array<int32_t, 6>& B, const std::array<int32_t, 3>& last) {
  for (int a = 0; a < d; ++a) {
    const int32_t blo = B[static_cast<size_t>(2 * a)];
    const int32_t bhi = B[static_cast<size_t>(2 * a + 1)];
    if (!(ehi[a] > blo || blo == 0)) return false;
    if (!(elo[a] < bhi || bhi == last[static_cast<size_t>(a)])) return false;
  }
  return true;
}

bool ext_in_open(int d, const int32_t* elo, const int32_t* ehi,
                 const std::array<int32_t, 6>& B, const std::array<int32_t, 3>& last) {
  for (int a = 0; a < d; ++a) {
    const int32_t blo = B[static_cast<size_t>(2 * a)];
    const int32_t bhi = B[static_cast<size_t>(2 * a + 1)];
    if (!(blo < elo[a] || (blo == elo[a] && blo == 0))) return false;
    if (!(ehi[a] < bhi || (ehi[a] == bhi && bhi == last[static_cast<size_t>(a)]))) return false;
  }
  return true;
}

// A face lies in Fr B iff it lies in cl B but not in the open box (with the
// cube boundary absorbed). Exact for single faces of any arrangement whose
// cuts include the box facets; for closed hulls of face ranges the positive
// answer is monotone under shrinking, which is what the region pruning uses.
bool ext_in_frontier(int d, const int32_t* elo, const int32_t* ehi,
                     const std::array<int32_t, 6>& B, const std::array<int32_t, 3>& last) {
  return ext_in(d, elo, ehi, B) && !ext_meets_open(d, elo, ehi, B, last);
}

// One refinement step lifted to the union of the parent's, the children's,
// and the chosen covers' axis coordinates. Faces of this step arrangement
// are the quantification domain of the refinement lemmas; children and the
// parent enter through their closed full-dimensional cells, whose facets all
// appear among the coordinates, so face-in-closure is "extent inside one
// cell" and every test is integer arithmetic on ranks.
struct StepScan {
  int d = 0;
  bool lemmas = true;
  bool decomposition = true;
  std::array<std::vector<Rational>, 3> vals;
  std::array<int32_t, 3> items{};
  std::array<int32_t, 3> last{};
  std::vector<std::array<int32_t, 6>> pcells;
  std::vector<std::vector<std::array<int32_t, 6>>> kcells;  // children, slot order
  std::vector<int64_t> kslot;                               // child -> cover slot
  std::vector<std::array<int32_t, 6>> covers;               // every chosen cover
  int64_t faces = 0;
  int64_t dropped = 0;
  std::vector<std::pair<int, std::string>> viols;  // (kind, witness face)
  // kinds: 1 lemma non-maximal frontier, 2 lemma budget count, 3 parent face
  // outside every child, 4 two children sharing a full-dimensional face,
  // 5 child cell outside its cover, 6 child cell outside the parent

  static constexpr size_t kCap = 256;

  void add(int kind, std::string w) {
    if (viols.size() < kCap) viols.emplace_back(kind, std::move(w));
    else ++dropped;
  }

  int32_t rank(int a, const Rational& v) const {
    const auto& t = vals[static_cast<size_t>(a)];
    const auto it = std::lower_bound(t.begin(), t.end(), v);
    if (it == t.end() || *it != v) throw Error("internal: step coordinate missing from its table");
    return static_cast<int32_t>(it - t.begin());
  }

  std::string face_string(const int32_t* it) const {
    std::string s;
    for (int a = 0; a < d; ++a) {
      if (a) s += " x ";
      const auto& v = vals[static_cast<size_t>(a)];
      if (it[a] & 1) {
        s += "(" + rational_string(v[static_cast<size_t>((it[a] - 1) >> 1)]) + "," +
             rational_string(v[static_cast<size_t>((it[a] + 1) >> 1)]) + ")";
      } else {
        s += "{" + rational_string(v[static_cast<size_t>(it[a] >> 1)]) + "}";
      }
    }
    return s;
  }

  std::string cell_string(const std::array<int32_t, 6>& B) const {
    std::string s;
    for (int a = 0; a < d; ++a) {
      if (a) s += " x ";
      s += "[" + rational_string(vals[static_cast<size_t>(a)][static_cast<size_t>(B[static_cast<size_t>(2 * a)])]) +
           "," + rational_string(vals[static_cast<size_t>(a)][static_cast<size_t>(B[static_cast<size_t>(2 * a + 1)])]) + "]";
    }
    return s;
  }
};

// Region of the step arrangement: an item range per axis plus the婁 classes
// of every child, cover, and the parent over it. Classes only harden as the
// region shrinks, so they are carried down the recursion.
struct StepNode {
  std::array<int32_t, 3> r0{};
  std::array<int32_t, 3> r1{};
  std::vector<uint8_t> kid;  // 0 no face incident, 1 every face, 2 unresolved
  std::vector<uint8_t> cov;  // 0 no face in Fr, 1 every face in Fr, 2 unresolved
  uint8_t par = 2;
};

void step_single(StepScan& S, const StepNode& n) {
  int32_t it[3], elo[3], ehi[3];
  bool fulldim = true;
  for (int a = 0; a < S.d; ++a) {
    it[a] = n.r0[static_cast<size_t>(a)];
    if (it[a] & 1) {
      elo[a] = (it[a] - 1) >> 1;
      ehi[a] = (it[a] + 1) >> 1;
    } else {
      elo[a] = ehi[a] = it[a] >> 1;
      fulldim = false;
    }
  }
  const auto incident = [&](size_t k) {
    if (n.kid[k] != 2) return n.kid[k] == 1;
    for (const auto& c : S.kcells[k]) {
      if (ext_in(S.d, elo, ehi, c)) return true;
    }
    return false;
  };
  std::vector<size_t> F;
  for (size_t k = 0; k < S.kcells.size(); ++k) {
    if (n.kid[k] != 0 && incident(k)) F.push_back(k);
  }
  bool parent_in = n.par == 1;
  if (n.par == 2) {
    for (const auto& c : S.pcells) {
      if (ext_in(S.d, elo, ehi, c)) {
        parent_in = true;
        break;
      }
    }
  }
  if (S.decomposition) {
    if (parent_in && F.empty()) S.add(3, S.face_string(it));
    if (fulldim && F.size() >= 2) S.add(4, S.face_string(it));
  }
  if (S.lemmas && F.size() >= 2) {
    const auto in_fr = [&](size_t slot) {
      if (n.cov[slot] != 2) return n.cov[slot] == 1;
      return ext_in_frontier(S.d, elo, ehi, S.covers[slot], S.last);
    };
    for (size_t i = 0; i + 1 < F.size(); ++i) {
      if (!in_fr(static_cast<size_t>(S.kslot[F[i]]))) S.add(1, S.face_string(it));
    }
    int64_t cnt = 0;
    for (size_t s = 0; s < S.covers.size(); ++s) {
      if (n.cov[s] != 0 && in_fr(s)) ++cnt;
    }
    if (static_cast<int64_t>(F.size()) - 1 > cnt) S.add(2, S.face_string(it));
  }
  ++S.faces;
}

void step_walk(StepScan& S, StepNode n) {
  for (;;) {
    int32_t hl[3], hh[3];
    bool single = true;
    for (int a = 0; a < S.d; ++a) {
      hl[a] = n.r0[static_cast<size_t>(a)] >> 1;
      hh[a] = (n.r1[static_cast<size_t>(a)] + 1) >> 1;
      single = single && n.r0[static_cast<size_t>(a)] == n.r1[static_cast<size_t>(a)];
    }
    if (single) {
      step_single(S, n);
      return;
    }
    if (n.par == 2) {
      bool any = false, full = false;
      for (const auto& c : S.pcells) {
        if (ext_in(S.d, hl, hh, c)) {
          full = true;
          break;
        }
        if (!ext_disjoint(S.d, hl, hh, c)) any = true;
      }
      n.par = full ? 1 : any ? 2 : 0;
      // Outside the parent closure every child is absent too (children stay
      // inside their parent), so their classes drop with it.
      if (n.par == 0) std::fill(n.kid.begin(), n.kid.end(), uint8_t(0));
    }
    for (size_t k = 0; k < n.kid.size(); ++k) {
      if (n.kid[k] != 2) continue;
      bool any = false, full = false;
      for (const auto& c : S.kcells[k]) {
        if (ext_in(S.d, hl, hh, c)) {
          full = true;
          break;
        }
        if (!ext_disjoint(S.d, hl, hh, c)) any = true;
      }
      n.kid[k] = full ? 1 : any ? 2 : 0;
    }
    size_t m = 0, msure = 0, top = 0;
    for (size_t k = 0; k < n.kid.size(); ++k) {
      if (n.kid[k] != 0) {
        ++m;
        top = k;
      }
      if (n.kid[k] == 1) ++msure;
    }
    if (S.lemmas) {
      for (size_t s = 0; s < n.cov.size(); ++s) {
        if (n.cov[s] != 2) continue;
        if (ext_in_frontier(S.d, hl, hh, S.covers[s], S.last)) n.cov[s] = 1;
        else if (ext_disjoint(S.d, hl, hh, S.covers[s]) ||
                 ext_in_open(S.d, hl, hh, S.covers[s], S.last))
          n.cov[s] = 0;
      }
    }
    // Conservative region verdicts; every one is exact at a single face.
    bool pass = true;
    if (S.lemmas && m > 1) {
      // Non-maximal incident children at any face here are among the
      // possibly-incident ones below `top`, so sure frontiers for all of
      // those settle lemma 1; their count settles lemma 2.
      int64_t sure_fr = 0;
      for (uint8_t c : n.cov) sure_fr += c == 1;
      pass = static_cast<int64_t>(m) - 1 <= sure_fr;
      for (size_t k = 0; pass && k < n.kid.size(); ++k) {
        if (n.kid[k] != 0 && k != top) pass = n.cov[static_cast<size_t>(S.kslot[k])] == 1;
      }
    }
    if (S.decomposition && pass) {
      pass = (n.par == 0 || msure > 0) && m <= 1;
    }
    if (pass) {
      int64_t vol = 1;
      for (int a = 0; a < S.d; ++a)
        vol *= n.r1[static_cast<size_t>(a)] - n.r0[static_cast<size_t>(a)] + 1;
      S.faces += vol;
      return;
    }
    int axis = 0;
    int32_t width = -1;
    for (int a = 0; a < S.d; ++a) {
      const int32_t w = n.r1[static_cast<size_t>(a)] - n.r0[static_cast<size_t>(a)];
      if (w > width) {
        width = w;
        axis = a;
      }
    }
    const int32_t mid = n.r0[static_cast<size_t>(axis)] +
                        (n.r1[static_cast<size_t>(axis)] - n.r0[static_cast<size_t>(axis)]) / 2;
    StepNode left = n;
    left.r1[static_cast<size_t>(axis)] = mid;
    step_walk(S, std::move(left));
    n.r0[static_cast<size_t>(axis)] = mid + 1;
  }
}

StepScan scan_step(const Tower& tw, const BaseFamily& base, const RefinementStep& st,
                   bool lemmas, bool decomposition) {
  StepScan S;
  S.d = tw.d;
  S.lemmas = lemmas;
  S.decomposition = decomposition;

  const RoSet& parent = tw.levels[static_cast<size_t>(st.level)].tiles[static_cast<size_t>(st.parent)];
  const std::vector<Box> praw = parent.full_cells();
  std::vector<std::vector<Box>> kraw(st.children.size());
  for (size_t j = 0; j < st.children.size(); ++j) {
    kraw[j] = tw.levels[static_cast<size_t>(st.level + 1)]
                  .tiles[static_cast<size_t>(st.children[j])]
                  .full_cells();
  }

  for (int a = 0; a < S.d; ++a) {
    auto& v = S.vals[static_cast<size_t>(a)];
    v.push_back(Rational(0));
    v.push_back(Rational(1));
    for (const Box& c : praw) {
      v.push_back(c.lo(a));
      v.push_back(c.hi(a));
    }
    for (const auto& cells : kraw) {
      for (const Box& c : cells) {
        v.push_back(c.lo(a));
        v.push_back(c.hi(a));
      }
    }
    for (int64_t i : st.chosen) {
      v.push_back(base.box(i).lo(a));
      v.push_back(base.box(i).hi(a));
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    S.items[static_cast<size_t>(a)] = static_cast<int32_t>(2 * v.size() - 1);
    S.last[static_cast<size_t>(a)] = static_cast<int32_t>(v.size() - 1);
  }

  const auto to_rank = [&](const Box& b) {
    std::array<int32_t, 6> rb{};
    for (int a = 0; a < S.d; ++a) {
      rb[static_cast<size_t>(2 * a)] = S.rank(a, b.lo(a));
      rb[static_cast<size_t>(2 * a + 1)] = S.rank(a, b.hi(a));
    }
    return rb;
  };
  for (const Box& c : praw) S.pcells.push_back(to_rank(c));
  S.kcells.resize(kraw.size());
  for (size_t j = 0; j < kraw.size(); ++j) {
    for (const Box& c : kraw[j]) S.kcells[j].push_back(to_rank(c));
    S.kslot.push_back(j < st.child_slots.size() ? st.child_slots[j] : 0);
  }
  for (int64_t i : st.chosen) S.covers.push_back(to_rank(base.box(i)));

  if (decomposition) {
    // Containment side of the decomposition: every child cell inside its
    // cover's closed box, and inside the parent closure. The latter is
    // checked on the sub-boxes the parent facets split the cell into; a
    // sub-box crossed by no parent facet lies in a parent cell iff their
    // interiors meet.
    for (size_t j = 0; j < S.kcells.size(); ++j) {
      const auto& cov = S.covers[static_cast<size_t>(S.kslot[j])];
      for (const auto& c : S.kcells[j]) {
        if (!ext_in(S.d, c.data(), c.data() + 1, cov)) {
          // extents interleave lo/hi; test via explicit arrays
        }
      }
    }
    for (size_t j = 0; j < S.kcells.size(); ++j) {
      const auto& cov = S.covers[static_cast<size_t>(S.kslot[j])];
      for (const auto& c : S.kcells[j]) {
        int32_t clo[3], chi[3];
        for (int a = 0; a < S.d; ++a) {
          clo[a] = c[static_cast<size_t>(2 * a)];
          chi[a] = c[static_cast<size_t>(2 * a + 1)];
        }
        if (!ext_in(S.d, clo, chi, cov)) S.add(5, S.cell_string(c));

        std::array<std::vector<int32_t>, 3> sub;
        for (int a = 0; a < S.d; ++a) {
          auto& sv = sub[static_cast<size_t>(a)];
          sv.push_back(clo[a]);
          for (const auto& p : S.pcells) {
            for (int side = 0; side < 2; ++side) {
              const int32_t r = p[static_cast<size_t>(2 * a + side)];
              if (clo[a] < r && r < chi[a]) sv.push_back(r);
            }
          }
          sv.push_back(chi[a]);
          std::sort(sv.begin(), sv.end());
          sv.erase(std::unique(sv.begin(), sv.end()), sv.end());
        }
        int ix[3] = {0, 0, 0};
        bool inside = true;
        while (inside) {
          int32_t slo[3], shi[3];
          for (int a = 0; a < S.d; ++a) {
            slo[a] = sub[static_cast<size_t>(a)][static_cast<size_t>(ix[a])];
            shi[a] = sub[static_cast<size_t>(a)][static_cast<size_t>(ix[a] + 1)];
          }
          bool hit = false;
          for (const auto& p : S.pcells) {
            bool meet = true;
            for (int a = 0; a < S.d && meet; ++a) {
              meet = std::max(p[static_cast<size_t>(2 * a)], slo[a]) <
                     std::min(p[static_cast<size_t>(2 * a + 1)], shi[a]);
            }
            if (meet) {
              hit = true;
              break;
            }
          }
          if (!hit) {
            std::array<int32_t, 6> sb{};
            for (int a = 0; a < S.d; ++a) {
              sb[static_cast<size_t>(2 * a)] = slo[a];
              sb[static_cast<size_t>(2 * a + 1)] = shi[a];
            }
            S.add(6, S.cell_string(sb));
            inside = false;
          }
          int a = 0;
          while (a < S.d && ix[a] + 2 == static_cast<int>(sub[static_cast<size_t>(a)].size())) {
            ix[a++] = 0;
          }
          if (a == S.d) break;
          if (inside) ++ix[a];
          else break;
        }
      }
    }
  }

  StepNode root;
  for (int a = 0; a < S.d; ++a) {
    root.r0[static_cast<size_t>(a)] = 0;
    root.r1[static_cast<size_t>(a)] = S.items[static_cast<size_t>(a)] - 1;
  }
  root.kid.assign(S.kcells.size(), 2);
  root.cov.assign(S.covers.size(), lemmas ? 2 : 0);
  step_walk(S, std::move(root));
  return S;
}

void validate_steps(const Tower& tw, const BaseFamily& base) {
  const int L = static_cast<int>(tw.levels.size());
  for (const RefinementStep& st : tw.steps) {
    if (st.level < 0 || st.level >= L - 1)
      throw InvalidArgument("step level outside the tower");
    if (st.parent < 0 ||
        st.parent >= static_cast<int32_t>(tw.levels[static_cast<size_t>(st.level)].tiles.size()))
      throw InvalidArgument("step parent index out of range");
    if (st.child_slots.size() != st.children.size())
      throw InvalidArgument("step child slot list does not match its children");
    const auto nt = static_cast<int32_t>(tw.levels[static_cast<size_t>(st.level + 1)].tiles.size());
    for (int32_t c : st.children) {
      if (c < 0 || c >= nt) throw InvalidArgument("step child index out of range");
    }
    for (int64_t s : st.child_slots) {
      if (s < 0 || s >= static_cast<int64_t>(st.chosen.size()))
        throw InvalidArgument("step cover slot out of range");
    }
    for (int64_t i : st.chosen) {
      if (i < 0 || i >= base.size()) throw InvalidArgument("step cover index outside the base");
    }
  }
}

}  // namespace

LemmaReport lemma_sweeps(const Tower& tower, const BaseFamily& base, int jobs) {
  if (tower.levels.empty()) throw InvalidArgument("tower has no levels");
  if (base.d != tower.d) throw InvalidArgument("base dimension does not match the tower");
  validate_steps(tower, base);

  const int64_t ns = static_cast<int64_t>(tower.steps.size());
  std::vector<StepScan> scans(static_cast<size_t>(ns));
  std::vector<std::exception_ptr> errs(static_cast<size_t>(ns));
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs > 1 ? jobs : 1)
  for (int64_t i = 0; i < ns; ++i) {
    try {
      scans[static_cast<size_t>(i)] =
          scan_step(tower, base, tower.steps[static_cast<size_t>(i)], true, false);
    } catch (...) {
      errs[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  LemmaReport rep;
  rep.steps_checked = ns;
  for (int64_t i = 0; i < ns; ++i) {
    const StepScan& s = scans[static_cast<size_t>(i)];
    const RefinementStep& st = tower.steps[static_cast<size_t>(i)];
    rep.faces_checked += s.faces;
    for (const auto& [kind, face] : s.viols) {
      rep.violations.push_back({st.level, st.parent, kind, face});
    }
    if (s.dropped > 0) rep.ok = false;
  }
  rep.ok = rep.ok && rep.violations.empty();
  return rep;
}

// ---------------------------------------------------------- verify_tower ----

VerifyReport verify_tower(const Tower& tower, const BaseFamily& base,
                          const VerifyOptions& opt) {
  if (opt.samples_per_face < 1)
    throw InvalidArgument("verify needs at least one sample per face");
  if (tower.d < 1 || tower.d > 3) throw InvalidArgument("tower dimension out of range");
  if (base.d != tower.d) throw InvalidArgument("base dimension does not match the tower");

  VerifyReport R;
  const auto fail = [&](const char* check, int level, int64_t index, std::string witness) {
    R.ok = false;
    if (static_cast<int64_t>(R.failures.size()) < opt.max_failures) {
      R.failures.push_back({check, level, index, std::move(witness)});
    } else {
      ++R.failures_dropped;
    }
  };

  // ---- structure: levels, schedule, parent maps, steps, budgets ----
  const int L = static_cast<int>(tower.levels.size());
  if (L == 0) {
    fail("structure", -1, -1, "tower has no levels");
    return R;
  }
  bool shape_ok = true;
  if (static_cast<int>(tower.schedule.size()) != L) {
    fail("structure", -1, -1, "schedule length does not match the level count");
    shape_ok = false;
  }
  for (size_t k = 0; shape_ok && k < tower.schedule.size(); ++k) {
    if (!(tower.schedule[k] > 0)) {
      fail("structure", static_cast<int>(k), -1, "non-positive diameter bound");
      shape_ok = false;
    }
  }
  if (tower.levels[0].tiles.size() != 1 || !tower.levels[0].tiles[0].is_whole()) {
    fail("structure-root", 0, -1, "level 0 is not the single tile X");
  }
  for (int k = 0; k < L; ++k) {
    if (tower.levels[static_cast<size_t>(k)].tiles.empty()) {
      fail("structure", k, -1, "level without tiles");
      shape_ok = false;
    }
    for (size_t t = 0; t < tower.levels[static_cast<size_t>(k)].tiles.size(); ++t) {
      if (tower.levels[static_cast<size_t>(k)].tiles[t].dim() != tower.d) {
        fail("structure", k, static_cast<int64_t>(t), "tile carrier dimension mismatch");
        shape_ok = false;
      }
    }
  }
  if (static_cast<int>(tower.parent.size()) != L) {
    fail("structure-parent", -1, -1, "parent map level count mismatch");
    shape_ok = false;
  }
  if (shape_ok && !tower.parent[0].empty()) {
    fail("structure-parent", 0, -1, "level 0 has parents");
  }
  for (int k = 1; shape_ok && k < L; ++k) {
    const auto& col = tower.parent[static_cast<size_t>(k)];
    const auto nt = tower.levels[static_cast<size_t>(k)].tiles.size();
    const auto np = static_cast<int32_t>(tower.levels[static_cast<size_t>(k - 1)].tiles.size());
    if (col.size() != nt) {
      fail("structure-parent", k, -1, "parent column size mismatch");
      shape_ok = false;
      break;
    }
    for (size_t t = 0; t < col.size(); ++t) {
      if (col[t] < 0 || col[t] >= np) {
        fail("structure-parent", k, static_cast<int64_t>(t), "parent index out of range");
        shape_ok = false;
      } else if (t > 0 && col[t] < col[t - 1]) {
        fail("structure-parent", k, static_cast<int64_t>(t), "parent map not grouped by parent");
        shape_ok = false;
      }
    }
  }
  bool steps_ok = shape_ok;
  if (shape_ok) {
    try {
      validate_steps(tower, base);
    } catch (const InvalidArgument& e) {
      fail("structure-steps", -1, -1, e.what());
      steps_ok = false;
    }
  }
  if (steps_ok) {
    // Steps must refine every non-leaf tile exactly once, in level-major
    // parent order, with children matching the parent map and the next
    // level's index sequence; covers must be globally fresh and within the
    // diameter schedule, and each level's budget must equal the spent set.
    size_t si = 0;
    std::set<int64_t> spent;
    for (int k = 0; k + 1 < L && steps_ok; ++k) {
      const auto npar = tower.levels[static_cast<size_t>(k)].tiles.size();
      int32_t next_child = 0;
      for (size_t t = 0; t < npar; ++t) {
        if (si >= tower.steps.size()) {
          fail("structure-steps", k, static_cast<int64_t>(t), "missing refinement step");
          steps_ok = false;
          break;
        }
        const RefinementStep& st = tower.steps[si++];
        if (st.level != k || st.parent != static_cast<int32_t>(t)) {
          fail("structure-steps", k, static_cast<int64_t>(t), "steps out of level-major order");
          steps_ok = false;
          break;
        }
        for (size_t j = 0; j < st.children.size(); ++j) {
          if (st.children[j] != next_child++) {
            fail("structure-steps", k, static_cast<int64_t>(t), "children out of sequence");
            steps_ok = false;
            break;
          }
          if (tower.parent[static_cast<size_t>(k + 1)][static_cast<size_t>(st.children[j])] !=
              st.parent) {
            fail("structure-steps", k, static_cast<int64_t>(st.children[j]),
                 "parent map disagrees with the recording step");
            steps_ok = false;
          }
          if (j > 0 && st.child_slots[j] <= st.child_slots[j - 1]) {
            fail("structure-steps", k, static_cast<int64_t>(t), "cover slots not increasing");
          }
        }
        if (!steps_ok) break;
        for (int64_t i : st.chosen) {
          if (!spent.insert(i).second) {
            fail("fresh-index-reuse", k, static_cast<int64_t>(t),
                 "base index " + std::to_string(i) + " spent twice");
          }
          if (static_cast<int>(tower.schedule.size()) > k + 1 &&
              !(base.box(i).diameter() < tower.schedule[static_cast<size_t>(k + 1)])) {
            fail("step-cover-diameter", k, i, box_string(base.box(i)));
          }
        }
      }
      if (!steps_ok) break;
      if (next_child != static_cast<int32_t>(tower.levels[static_cast<size_t>(k + 1)].tiles.size())) {
        fail("structure-steps", k, -1, "children do not exhaust the next level");
        steps_ok = false;
      }
      const auto& budget = tower.levels[static_cast<size_t>(k + 1)].budget;
      if (budget != spent) {
        fail("budget-bookkeeping", k + 1, -1,
             "budget does not equal the spent cover indices");
      }
    }
    if (steps_ok && si != tower.steps.size()) {
      fail("structure-steps", -1, -1, "extra refinement steps");
      steps_ok = false;
    }
    if (!tower.levels[0].budget.empty()) {
      fail("budget-bookkeeping", 0, -1, "level 0 budget not empty");
    }
  }

  // ---- base frontier-order property ----
  {
    const BaseCheck bc = check_base_property(base);
    if (!bc.ok) {
      std::string w = point_string(bc.witness_point) + " on";
      for (int64_t i : bc.witness_indices) w += " " + std::to_string(i);
      fail("base-property", -1, -1, std::move(w));
    }
  }

  // ---- per tile: nonempty, canonical, diameter, oracle agreement ----
  {
    struct TileRef {
      int level;
      int64_t index;
    };
    std::vector<TileRef> flat;
    for (int k = 0; k < L; ++k) {
      for (size_t t = 0; t < tower.levels[static_cast<size_t>(k)].tiles.size(); ++t) {
        flat.push_back({k, static_cast<int64_t>(t)});
      }
    }
    struct TileOut {
      std::vector<VerifyFailure> fails;
      int64_t faces = 0;
      int64_t samples = 0;
    };
    std::vector<TileOut> outs(flat.size());
    std::vector<std::exception_ptr> errs(flat.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(opt.jobs > 1 ? opt.jobs : 1)
    for (int64_t i = 0; i < static_cast<int64_t>(flat.size()); ++i) {
      try {
        const int k = flat[static_cast<size_t>(i)].level;
        const int64_t t = flat[static_cast<size_t>(i)].index;
        const RoSet& T = tower.levels[static_cast<size_t>(k)].tiles[static_cast<size_t>(t)];
        TileOut& out = outs[static_cast<size_t>(i)];
        if (T.empty()) {
          out.fails.push_back({"tile-nonempty", k, t, ""});
          continue;
        }
        const Bitset canon = T.arr->regularized(T.faces);
        if (canon != T.faces) {
          const Bitset diff = canon ^ T.faces;
          out.fails.push_back(
              {"tile-canonical", k, t, T.arr->face_string(static_cast<int64_t>(diff.find_first()))});
        }
        if (static_cast<int>(tower.schedule.size()) > k &&
            !(T.diameter() < tower.schedule[static_cast<size_t>(k)])) {
          out.fails.push_back({"tile-diameter", k, t, rational_string(T.diameter())});
        }
        const OracleAgreement oa =
            oracle_cross_check(T, opt.samples_per_face,
                               face_stream(opt.seed, static_cast<uint64_t>(i)));
        out.faces = oa.faces;
        out.samples = oa.samples;
        if (!oa.ok) {
          out.fails.push_back({"oracle-agreement", k, t, oa.witness});
        }
      } catch (...) {
        errs[static_cast<size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
    for (const TileOut& out : outs) {
      R.faces_checked += out.faces;
      R.samples_checked += out.samples;
      for (const VerifyFailure& f : out.fails) fail(f.check.c_str(), f.level, f.index, f.witness);
    }
  }

  // ---- per step: decomposition, lemmas, containments ----
  if (steps_ok) {
    const int64_t ns = static_cast<int64_t>(tower.steps.size());
    std::vector<StepScan> scans(static_cast<size_t>(ns));
    std::vector<std::exception_ptr> errs(static_cast<size_t>(ns));
#pragma omp parallel for schedule(dynamic, 1) num_threads(opt.jobs > 1 ? opt.jobs : 1)
    for (int64_t i = 0; i < ns; ++i) {
      try {
        scans[static_cast<size_t>(i)] =
            scan_step(tower, base, tower.steps[static_cast<size_t>(i)], true, true);
      } catch (...) {
        errs[static_cast<size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
    for (int64_t i = 0; i < ns; ++i) {
      const StepScan& s = scans[static_cast<size_t>(i)];
      const RefinementStep& st = tower.steps[static_cast<size_t>(i)];
      R.faces_checked += s.faces;
      for (const auto& [kind, w] : s.viols) {
        const char* name = kind == 1   ? "lemma-nonmax-frontier"
                           : kind == 2 ? "lemma-budget"
                           : kind == 3 ? "step-cover"
                           : kind == 4 ? "step-overlap"
                           : kind == 5 ? "child-outside-cover"
                                       : "child-outside-parent";
        fail(name, st.level, i, w);
      }
      if (s.dropped > 0) fail("step-violations-dropped", st.level, i, std::to_string(s.dropped));
    }
  }

  // ---- per level: pairwise disjointness; full tiling check when small ----
  for (int k = 0; k < L; ++k) {
    const auto& tiles = tower.levels[static_cast<size_t>(k)].tiles;
    std::vector<std::vector<Box>> cells(tiles.size());
    std::vector<std::vector<Rational>> hlo(tiles.size()), hhi(tiles.size());
    for (size_t t = 0; t < tiles.size(); ++t) {
      cells[t] = tiles[t].full_cells();
      tiles[t].extent(hlo[t], hhi[t]);
    }
    for (size_t t = 0; t < tiles.size(); ++t) {
      for (size_t u = t + 1; u < tiles.size(); ++u) {
        if (cells[t].empty() || cells[u].empty()) continue;
        bool hull = true;
        for (int a = 0; a < tower.d && hull; ++a) {
          hull = std::max(hlo[t][static_cast<size_t>(a)], hlo[u][static_cast<size_t>(a)]) <
                 std::min(hhi[t][static_cast<size_t>(a)], hhi[u][static_cast<size_t>(a)]);
        }
        if (!hull) continue;
        // Two regular open sets intersect iff two of their cells do in the
        // interior, so the cell pairs decide disjointness exactly.
        for (const Box& cb : cells[t]) {
          for (const Box& db : cells[u]) {
            bool meet = true;
            for (int a = 0; a < tower.d && meet; ++a) {
              meet = std::max(cb.lo(a), db.lo(a)) < std::min(cb.hi(a), db.hi(a));
            }
            if (meet) {
              fail("tiles-overlap", k, static_cast<int64_t>(t),
                   "tiles " + std::to_string(t) + " and " + std::to_string(u) + " meet at " +
                       box_string(cb));
              goto next_pair;
            }
          }
        }
      next_pair:;
      }
    }
    try {
      const TilingReport tr = check_tiling(tower.levels[static_cast<size_t>(k)], &base);
      if (!tr.ok) {
        fail("tiling-check", k, -1,
             tr.what + (tr.witness_face.empty() ? "" : " at " + tr.witness_face));
      }
    } catch (const GuardExceeded&) {
      // Level too large for the merged-arrangement check; disjointness was
      // just checked pairwise and cover and budget are swept below.
    }
  }

  // ---- whole-tower sweep: order, cover, fiber bounds ----
  if (steps_ok) {
    SweepOptions so;
    so.jobs = opt.jobs;
    so.with_histogram = false;
    R.sweep = sweep_tower(tower, so);
    R.faces_checked += R.sweep.faces;
    for (int k = 0; k < L; ++k) {
      if (R.sweep.max_order[static_cast<size_t>(k)] > base.n + 1) {
        fail("order-bound", k, -1,
             std::to_string(R.sweep.max_order[static_cast<size_t>(k)]) + " tiles at one face");
      }
      if (R.sweep.min_order[static_cast<size_t>(k)] < 1) {
        fail("level-cover", k, -1,
             k == L - 1 ? R.sweep.empty_witness : std::string("face outside every closure"));
      }
    }
    if (R.sweep.max_fiber > base.n + 1) fail("fiber-bound", L - 1, -1, R.sweep.max_witness);
    if (R.sweep.min_fiber < 1) fail("surjectivity", L - 1, -1, R.sweep.empty_witness);
  }

  // ---- chains and resolution ----
  if (steps_ok) {
    const auto& leaves = tower.levels[static_cast<size_t>(L - 1)].tiles;
    const std::vector<Chain> chains = enumerate_chains(tower);
    if (chains.size() != leaves.size()) {
      fail("chain-count", L - 1, -1,
           std::to_string(chains.size()) + " chains for " + std::to_string(leaves.size()) +
               " final tiles");
    } else {
      std::vector<std::vector<std::vector<Rational>>> extents(
          static_cast<size_t>(L));  // [k][t] -> lo..hi concatenated
      for (int k = 0; k < L; ++k) {
        const auto& tl = tower.levels[static_cast<size_t>(k)].tiles;
        extents[static_cast<size_t>(k)].resize(tl.size());
        for (size_t t = 0; t < tl.size(); ++t) {
          std::vector<Rational> lo, hi;
          if (tl[t].extent(lo, hi)) {
            auto& e = extents[static_cast<size_t>(k)][t];
            e = lo;
            e.insert(e.end(), hi.begin(), hi.end());
          }
        }
      }
      for (size_t l = 0; l < chains.size(); ++l) {
        const Chain& c = chains[l];
        bool linked = static_cast<int>(c.tiles.size()) == L &&
                      c.tiles.back() == static_cast<int32_t>(l);
        for (int k = 1; linked && k < L; ++k) {
          linked = tower.parent[static_cast<size_t>(k)][static_cast<size_t>(c.tiles[static_cast<size_t>(k)])] ==
                   c.tiles[static_cast<size_t>(k - 1)];
        }
        if (!linked) {
          fail("chain-structure", L - 1, static_cast<int64_t>(l), "chain does not follow the parent map");
          continue;
        }
        const Box b = resolve_chain(tower, c);
        if (!(b.diameter() < tower.schedule[static_cast<size_t>(L - 1)])) {
          fail("chain-diameter", L - 1, static_cast<int64_t>(l), box_string(b));
        }
        for (int k = 0; k < L; ++k) {
          const auto& e = extents[static_cast<size_t>(k)][static_cast<size_t>(c.tiles[static_cast<size_t>(k)])];
          if (e.empty()) continue;
          bool inside = true;
          for (int a = 0; a < tower.d && inside; ++a) {
            inside = b.lo(a) >= e[static_cast<size_t>(a)] &&
                     b.hi(a) <= e[static_cast<size_t>(tower.d + a)];
          }
          if (!inside) {
            fail("chain-nesting", k, static_cast<int64_t>(l), box_string(b));
            break;
          }
        }
      }
    }

    // Chain-based fiber reports against the sweep's closure counting, on a
    // face sample of the final arrangement when it is enumerable.
    int64_t nf = 1;
    for (const auto& v : final_cuts(tower)) {
      nf *= static_cast<int64_t>(2 * v.size() - 1);
      if (nf > kMaxEnumerableFaces) break;
    }
    if (nf <= (int64_t(1) << 22)) {
      const ArrangementPtr fine = final_arrangement(tower);
      std::set<int64_t> sample;
      for (int64_t f = 0; f < std::min<int64_t>(nf, 64); ++f) sample.insert(f);
      std::mt19937_64 rng(face_stream(opt.seed, 0x7acesULL));
      for (int i = 0; i < 64; ++i) sample.insert(static_cast<int64_t>(rand_below(rng, static_cast<uint64_t>(nf))));
      for (int64_t f : sample) {
        const FiberReport fr = fiber_of_face(*fine, f, tower);
        bool ok = static_cast<int>(fr.counts.size()) == L && fr.fiber == fr.counts.back() &&
                  fr.fiber == static_cast<int64_t>(fr.leaves.size());
        for (size_t k = 0; ok && k + 1 < fr.counts.size(); ++k) {
          ok = fr.counts[k] <= fr.counts[k + 1];
        }
        int k0 = L - 1;
        while (k0 > 0 && fr.counts[static_cast<size_t>(k0 - 1)] == fr.fiber) --k0;
        ok = ok && k0 == fr.stabilization && fr.fiber >= 1 && fr.fiber <= base.n + 1;
        if (!ok) fail("fiber-consistency", -1, f, fine->face_string(f));
      }
    }
  }

  R.ok = R.failures.empty() && R.failures_dropped == 0;
  return R;
}

}  // namespace tileres
