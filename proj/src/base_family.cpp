#include "tileres/base_family.hpp"

#include <algorithm>
#include <random>

#include "tileres/arrangement.hpp"
#include "tileres/errors.hpp"

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

constexpr int64_t kJitterRand = int64_t(1) << 16;    // R: random part per endpoint
constexpr int64_t kJitterCounter = int64_t(1) << 24; // C: global endpoint counter cap

int64_t ceil_div(const BigInt& num, const BigInt& den) {
  return static_cast<int64_t>(BigInt((num + den - 1) / den));
}

// Interior facet values per axis, for distinctness checks.
std::vector<std::vector<Rational>> interior_values(const BaseFamily& f) {
  std::vector<std::vector<Rational>> vals(static_cast<size_t>(f.d));
  for (const Box& b : f.boxes) {
    for (int a = 0; a < f.d; ++a) {
      if (b.lo(a) != 0) vals[static_cast<size_t>(a)].push_back(b.lo(a));
      if (b.hi(a) != 1) vals[static_cast<size_t>(a)].push_back(b.hi(a));
    }
  }
  return vals;
}

bool axiswise_distinct(const BaseFamily& f, Rational* collision) {
  auto vals = interior_values(f);
  for (auto& v : vals) {
    std::sort(v.begin(), v.end());
    for (size_t i = 1; i < v.size(); ++i) {
      if (v[i - 1] == v[i]) {
        if (collision) *collision = v[i];
        return false;
      }
    }
  }
  return true;
}

int64_t arrangement_face_count(int d, const std::vector<Box>& boxes) {
  std::vector<std::vector<Rational>> cuts(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) cuts[a] = {Rational(0), Rational(1)};
  for (const Box& b : boxes) {
    for (int a = 0; a < d; ++a) {
      cuts[a].push_back(b.lo(a));
      cuts[a].push_back(b.hi(a));
    }
  }
  int64_t n = 1;
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    n *= static_cast<int64_t>(2 * c.size() - 1);
    if (n > kMaxEnumerableFaces) return n;
  }
  return n;
}

}  // namespace

void BaseFamily::candidates(const Box& hull, const Rational& diam_bound,
                            std::vector<int64_t>& out) const {
  out.clear();
  if (segments.empty()) {
    for (int64_t i = 0; i < size(); ++i) {
      const Box& b = box(i);
      if (!(b.diameter() < diam_bound)) continue;
      bool meet = true;
      for (int a = 0; a < d && meet; ++a) {
        meet = b.lo(a) <= hull.hi(a) && hull.lo(a) <= b.hi(a);
      }
      if (meet) out.push_back(i);
    }
    return;
  }
  for (const BaseSegment& seg : segments) {
    const bool all_small = seg.max_len < diam_bound;
    const int64_t cells = seg.cells_per_round();
    const int64_t rounds = (seg.count + cells - 1) / cells;
    // Conservative per-axis brick range from the nominal grid: the actual
    // endpoints differ from j*pitch and j*pitch + nominal_len only inward,
    // so brick j can meet the hull only if the nominal closed interval does.
    int32_t jlo[3], jhi[3];
    bool any = true;
    for (int a = 0; a < d && any; ++a) {
      // smallest j with j*pitch + nominal_len >= hull.lo  and
      // largest  j with j*pitch <= hull.hi, clamped to the grid
      const Rational lo_bound = (hull.lo(a) - seg.nominal_len) / seg.pitch;
      const Rational hi_bound = hull.hi(a) / seg.pitch;
      const BigInt lo_ceil = (rat_num(lo_bound) + rat_den(lo_bound) - 1) / rat_den(lo_bound);
      const BigInt hi_floor = rat_num(hi_bound) / rat_den(hi_bound);
      int64_t j0 = lo_bound > 0 ? static_cast<int64_t>(lo_ceil) : 0;
      int64_t j1 = std::min<int64_t>(seg.bricks - 1, static_cast<int64_t>(hi_floor));
      jlo[a] = static_cast<int32_t>(std::max<int64_t>(j0, 0));
      jhi[a] = static_cast<int32_t>(j1);
      if (jlo[a] > jhi[a]) any = false;
    }
    if (!any) continue;
    for (int64_t r = 0; r < rounds; ++r) {
      int32_t it[3];
      for (int a = 0; a < d; ++a) it[a] = jlo[a];
      for (;;) {
        int64_t cell = 0, stride = 1;
        for (int a = 0; a < d; ++a) {
          cell += it[a] * stride;
          stride *= seg.bricks;
        }
        const int64_t idx = seg.first + r * cells + cell;
        if (idx < seg.first + seg.count) {
          const Box& b = box(idx);
          bool keep = all_small || b.diameter() < diam_bound;
          for (int a = 0; a < d && keep; ++a) {
            keep = b.lo(a) <= hull.hi(a) && hull.lo(a) <= b.hi(a);
          }
          if (keep) out.push_back(idx);
        }
        int a = 0;
        for (; a < d; ++a) {
          if (it[a] < jhi[a]) {
            ++it[a];
            break;
          }
          it[a] = jlo[a];
        }
        if (a == d) break;
      }
    }
  }
  // Rounds emit cells in ascending index order already and segments are laid
  // out in order, so the result is sorted; keep the sort as cheap insurance.
  std::sort(out.begin(), out.end());
}

BaseFamily make_base(int d, int64_t count, const Rational& max_diam, uint64_t seed) {
  if (d < 1 || d > 3) throw InvalidArgument("dimension must be 1, 2, or 3");
  if (count < 1) throw InvalidArgument("count must be positive");
  if (!(max_diam > 0) || max_diam > 1) throw InvalidArgument("max_diam must be in (0,1]");

  // Bricks of nominal length 9p/8 at pitch p overlap their neighbor by p/8.
  const Rational p = max_diam * Rational(13, 16);
  const Rational L = max_diam * Rational(117, 128);
  const Rational rest = Rational(1) - L;
  const int64_t n_axis = 1 + ceil_div(rat_num(rest) * rat_den(p), rat_den(rest) * rat_num(p));
  if (n_axis > (int64_t(1) << 20)) throw GuardExceeded("brick grid too fine");

  int64_t cells = 1;
  for (int a = 0; a < d; ++a) cells *= n_axis;
  if (count < cells) {
    throw InvalidArgument("cannot cover [0,1]^" + std::to_string(d) + ": need at least " +
                          std::to_string(cells) + " boxes of diameter < " +
                          rational_string(max_diam) + ", got " + std::to_string(count));
  }
  if (count > kJitterCounter / 8) throw GuardExceeded("base too large");

  // Every interior endpoint is shifted from its nominal grid value by
  // (random * C + counter + 1) / Q, rightward for lo, leftward for hi, with
  // the hi residues offset by R*C. Q is a multiple of 512 * den(max_diam),
  // so nominal values contribute nothing mod 4*R*C and the residue ranges
  // [1, RC] for lo and [2RC, 3RC) for hi stay disjoint: any two interior
  // endpoints of this call differ, across boxes, axes, and sides alike.
  const BigInt rc = BigInt(kJitterRand) * kJitterCounter;
  const BigInt q = BigInt(512) * rat_den(max_diam) * rc;
  std::mt19937_64 rng(seed);
  int64_t counter = 0;

  BaseFamily out;
  out.d = d;
  out.n = d;
  BaseSegment seg;
  seg.first = 0;
  seg.count = count;
  seg.max_diam = max_diam;
  seg.max_len = 0;
  seg.pitch = p;
  seg.nominal_len = L;
  seg.d = d;
  seg.bricks = static_cast<int32_t>(n_axis);

  // Boxes in index order: rounds outer, axis-0 fastest inner.
  int32_t it[3] = {0, 0, 0};
  for (int64_t emitted = 0; emitted < count; ++emitted) {
    std::vector<std::array<Rational, 2>> iv(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) {
      const int64_t j = it[a];
      Rational lo, hi;
      if (j == 0) {
        lo = 0;
      } else {
        const BigInt res = BigInt(rand_below(rng, kJitterRand)) * kJitterCounter + counter + 1;
        ++counter;
        lo = Rational(j) * p + Rational(res, q);
      }
      if (j == n_axis - 1) {
        hi = 1;
      } else {
        const BigInt res = rc + BigInt(rand_below(rng, kJitterRand)) * kJitterCounter + counter + 1;
        ++counter;
        hi = Rational(j) * p + L - Rational(res, q);
      }
      const Rational len = hi - lo;
      if (len > seg.max_len) seg.max_len = len;
      iv[static_cast<size_t>(a)] = {std::move(lo), std::move(hi)};
    }
    out.boxes.push_back(make_box(std::move(iv)));
    int a = 0;
    for (; a < d; ++a) {
      if (it[a] + 1 < seg.bricks) {
        ++it[a];
        break;
      }
      it[a] = 0;
    }
    if (a == d && emitted + 1 < count) {
      // next round of the same grid
      for (int b = 0; b < d; ++b) it[b] = 0;
    }
  }
  if (!(seg.max_len < max_diam)) throw Error("internal: brick exceeds max_diam");
  out.segments.push_back(std::move(seg));
  return out;
}

BaseFamily merge_bases(const std::vector<BaseFamily>& parts) {
  if (parts.empty()) throw InvalidArgument("nothing to merge");
  BaseFamily out;
  out.d = parts.front().d;
  out.n = parts.front().n;
  for (const BaseFamily& p : parts) {
    if (p.d != out.d) throw InvalidArgument("mixed dimensions in merge");
    const int64_t offset = out.size();
    out.boxes.insert(out.boxes.end(), p.boxes.begin(), p.boxes.end());
    for (BaseSegment seg : p.segments) {
      seg.first += offset;
      out.segments.push_back(std::move(seg));
    }
  }
  Rational collision;
  if (!axiswise_distinct(out, &collision)) {
    throw InvalidArgument("facet coordinate " + rational_string(collision) +
                          " repeats across merged bases; reseed a part");
  }
  return out;
}

BaseFamily family_from_boxes(int d, std::vector<Box> boxes) {
  if (d < 1 || d > 3) throw InvalidArgument("dimension must be 1, 2, or 3");
  for (const Box& b : boxes) {
    if (b.dim() != d) throw InvalidArgument("box dimension mismatch");
  }
  BaseFamily out;
  out.d = d;
  out.n = d;
  out.boxes = std::move(boxes);
  return out;
}

BaseCheck exhaustive_frontier_order(const BaseFamily& f) {
  if (arrangement_face_count(f.d, f.boxes) > kMaxEnumerableFaces) {
    throw GuardExceeded("base arrangement too large for an exhaustive sweep");
  }
  ArrangementPtr arr = Arrangement::from_boxes(f.d, f.boxes);
  std::vector<uint16_t> hits(static_cast<size_t>(arr->nfaces), 0);
  for (int64_t i = 0; i < f.size(); ++i) {
    Bitset fr = arr->box_closure_faces(f.box(i));
    fr -= arr->box_faces(f.box(i));
    for (size_t b = fr.find_first(); b != Bitset::npos; b = fr.find_next(b)) ++hits[b];
  }
  BaseCheck out;
  out.certified = false;
  int64_t worst = 0;
  for (int64_t fa = 0; fa < arr->nfaces; ++fa) {
    if (hits[static_cast<size_t>(fa)] > hits[static_cast<size_t>(worst)]) worst = fa;
  }
  out.max_order = arr->nfaces ? hits[static_cast<size_t>(worst)] : 0;
  out.ok = out.max_order <= f.n;
  if (!out.ok) {
    out.witness_point = arr->face_centroid(worst);
    for (int64_t i = 0; i < f.size(); ++i) {
      Bitset fr = arr->box_closure_faces(f.box(i));
      fr -= arr->box_faces(f.box(i));
      if (fr.test(static_cast<size_t>(worst))) out.witness_indices.push_back(i);
    }
  }
  return out;
}

BaseCheck check_base_property(const BaseFamily& f) {
  // The sweep walks every face once per element, so it is reserved for small
  // arrangements; above the budget the O(elements) certificate is preferred
  // and the sweep is only a fallback for families with repeated facets.
  constexpr int64_t kMaxSweepFaces = int64_t(1) << 22;
  const int64_t faces = arrangement_face_count(f.d, f.boxes);
  if (faces <= kMaxSweepFaces) {
    return exhaustive_frontier_order(f);
  }
  if (axiswise_distinct(f, nullptr)) {
    // Each interior facet value belongs to exactly one element, so a point
    // meets at most one element frontier per axis: order <= d.
    BaseCheck out;
    out.ok = f.d <= f.n;
    out.max_order = f.d;
    out.certified = true;
    return out;
  }
  if (faces <= kMaxEnumerableFaces) {
    return exhaustive_frontier_order(f);
  }
  throw GuardExceeded(
      "base too large for an exhaustive frontier sweep and facet coordinates "
      "are not distinct; no certificate applies");
}

}  // namespace tileres
