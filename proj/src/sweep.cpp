#include "tileres/sweep.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cstring>
#include <limits>

#include <boost/dynamic_bitset.hpp>

#include "tileres/errors.hpp"
#include "tileres/resolution.hpp"

namespace tileres {
namespace {

constexpr int kMaxLevels = 8;

// anc[k][l] = level-k ancestor of final tile l; ranges[k][t] = the contiguous
// span of final tiles below level-k tile t. Children are appended per parent,
// so each ancestor column is nondecreasing in the leaf index.
struct Ancestry {
  std::vector<std::vector<int32_t>> anc;
  std::vector<std::vector<std::pair<int32_t, int32_t>>> ranges;
};

Ancestry ancestry_of(const Tower& tw) {
  const int levels = static_cast<int>(tw.levels.size());
  if (levels > kMaxLevels) throw GuardExceeded("sweep supports at most 7 levels");
  const int32_t nl = static_cast<int32_t>(tw.levels.back().tiles.size());
  Ancestry out;
  out.anc.assign(static_cast<size_t>(levels), {});
  out.anc[static_cast<size_t>(levels - 1)].resize(static_cast<size_t>(nl));
  for (int32_t l = 0; l < nl; ++l) out.anc[static_cast<size_t>(levels - 1)][static_cast<size_t>(l)] = l;
  for (int k = levels - 2; k >= 0; --k) {
    const auto& par = tw.parent[static_cast<size_t>(k + 1)];
    const auto& below = out.anc[static_cast<size_t>(k + 1)];
    auto& col = out.anc[static_cast<size_t>(k)];
    col.resize(static_cast<size_t>(nl));
    for (int32_t l = 0; l < nl; ++l) col[static_cast<size_t>(l)] = par[static_cast<size_t>(below[static_cast<size_t>(l)])];
  }
  out.ranges.assign(static_cast<size_t>(levels), {});
  for (int k = 0; k < levels; ++k) {
    auto& rg = out.ranges[static_cast<size_t>(k)];
    rg.assign(tw.levels[static_cast<size_t>(k)].tiles.size(), {0, 0});
    const auto& col = out.anc[static_cast<size_t>(k)];
    for (int32_t l = 0; l < nl; ++l) {
      if (l > 0 && col[static_cast<size_t>(l)] < col[static_cast<size_t>(l - 1)])
        throw Error("internal: parent map is not grouped by parent");
      auto& span = rg[static_cast<size_t>(col[static_cast<size_t>(l)])];
      if (span.first == span.second) span = {l, l + 1};
      else span.second = l + 1;
    }
  }
  return out;
}

// Merge-able partial result. Witnesses follow the argmax-first rule: a record
// is replaced only on strict improvement, so the recorded face is the first
// one attaining the final value in emission order. Merging in emission order
// preserves that.
struct Accum {
  int levels = 0;
  bool full = false;
  std::array<int64_t, kMaxLevels> maxo{};
  std::array<int64_t, kMaxLevels> mino{};
  std::array<int64_t, kMaxLevels> hist{};
  int64_t max_fiber = -1;
  int64_t min_fiber = std::numeric_limits<int64_t>::max();
  std::string max_witness;
  std::string empty_witness;
  int64_t faces_seen = 0;

  void init(int lv, bool fullmode) {
    levels = lv;
    full = fullmode;
    maxo.fill(-1);
    mino.fill(std::numeric_limits<int64_t>::max());
    hist.fill(0);
  }

  template <class Witness>
  void emit(const int64_t* counts, int64_t group, Witness&& face_str) {
    const int last = levels - 1;
    const int64_t fib = counts[last];
    if (fib > max_fiber) {
      max_fiber = fib;
      max_witness = face_str();
    }
    if (fib < min_fiber) {
      min_fiber = fib;
      if (fib == 0) empty_witness = face_str();
    }
    for (int k = 0; k < levels; ++k) {
      maxo[static_cast<size_t>(k)] = std::max(maxo[static_cast<size_t>(k)], counts[k]);
      mino[static_cast<size_t>(k)] = std::min(mino[static_cast<size_t>(k)], counts[k]);
    }
    if (full) {
      int k0 = last;
      while (k0 > 0 && counts[k0 - 1] == fib) --k0;
      hist[static_cast<size_t>(k0)] += group;
    }
    faces_seen += group;
  }

  void merge(const Accum& b) {
    for (int k = 0; k < levels; ++k) {
      maxo[static_cast<size_t>(k)] = std::max(maxo[static_cast<size_t>(k)], b.maxo[static_cast<size_t>(k)]);
      mino[static_cast<size_t>(k)] = std::min(mino[static_cast<size_t>(k)], b.mino[static_cast<size_t>(k)]);
      hist[static_cast<size_t>(k)] += b.hist[static_cast<size_t>(k)];
    }
    if (b.max_fiber > max_fiber) {
      max_fiber = b.max_fiber;
      max_witness = b.max_witness;
    }
    if (b.min_fiber < min_fiber) {
      min_fiber = b.min_fiber;
      empty_witness = b.empty_witness;
    }
    faces_seen += b.faces_seen;
  }
};

TowerSweep pack(const Accum& acc, bool dense, int64_t faces) {
  TowerSweep out;
  out.max_order.assign(acc.maxo.begin(), acc.maxo.begin() + acc.levels);
  out.min_order.assign(acc.mino.begin(), acc.mino.begin() + acc.levels);
  out.max_fiber = acc.max_fiber;
  out.min_fiber = acc.min_fiber == std::numeric_limits<int64_t>::max() ? 0 : acc.min_fiber;
  if (acc.full) {
    for (int k = 0; k < acc.levels; ++k) {
      if (acc.hist[static_cast<size_t>(k)] > 0)
        out.stabilization.emplace_back(k, acc.hist[static_cast<size_t>(k)]);
    }
  }
  out.max_witness = acc.max_witness;
  out.empty_witness = acc.empty_witness;
  out.dense = dense;
  out.faces = faces;
  return out;
}

// ---------------------------------------------------------------- dense ----

std::vector<Bitset> leaf_closures(const Tower& tw, const Arrangement& arr, int jobs) {
  const auto& leaves = tw.levels.back().tiles;
  const int32_t nl = static_cast<int32_t>(leaves.size());
  std::vector<Bitset> cl(static_cast<size_t>(nl));
  std::vector<std::exception_ptr> errs(static_cast<size_t>(nl));
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs > 1 ? jobs : 1)
  for (int32_t l = 0; l < nl; ++l) {
    try {
      cl[static_cast<size_t>(l)] = arr.closure(leaves[static_cast<size_t>(l)].faces_on(arr));
    } catch (...) {
      errs[static_cast<size_t>(l)] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return cl;
}

TowerSweep sweep_dense_serial(const Tower& tw, const Ancestry& an, const Arrangement& arr,
                              bool full) {
  const int levels = static_cast<int>(tw.levels.size());
  const int64_t nf = arr.face_count();
  const std::vector<Bitset> lcl = leaf_closures(tw, arr, 1);
  std::vector<std::vector<uint8_t>> cnt(static_cast<size_t>(levels),
                                        std::vector<uint8_t>(static_cast<size_t>(nf), 0));
  Bitset scratch(static_cast<size_t>(nf));
  for (int k = 0; k < levels; ++k) {
    auto& row = cnt[static_cast<size_t>(k)];
    for (const auto& span : an.ranges[static_cast<size_t>(k)]) {
      if (span.first == span.second) continue;
      const Bitset* bits = &lcl[static_cast<size_t>(span.first)];
      if (span.second - span.first > 1) {
        scratch = lcl[static_cast<size_t>(span.first)];
        for (int32_t l = span.first + 1; l < span.second; ++l) scratch |= lcl[static_cast<size_t>(l)];
        bits = &scratch;
      }
      for (size_t f = bits->find_first(); f != Bitset::npos; f = bits->find_next(f)) {
        if (row[f] != 255) ++row[f];
      }
    }
  }
  Accum acc;
  acc.init(levels, full);
  int64_t counts[kMaxLevels];
  for (int64_t f = 0; f < nf; ++f) {
    for (int k = 0; k < levels; ++k) counts[k] = cnt[static_cast<size_t>(k)][static_cast<size_t>(f)];
    acc.emit(counts, 1, [&] { return arr.face_string(f); });
  }
  assert(acc.faces_seen == nf);
  return pack(acc, true, nf);
}

TowerSweep sweep_dense_parallel(const Tower& tw, const Ancestry& an, const Arrangement& arr,
                                bool full, int jobs) {
  const int levels = static_cast<int>(tw.levels.size());
  const int64_t nf = arr.face_count();
  const int64_t nwords = (nf + 63) / 64;
  const std::vector<Bitset> lcl = leaf_closures(tw, arr, jobs);
  const int32_t nl = static_cast<int32_t>(lcl.size());
  std::vector<std::vector<uint64_t>> lw(static_cast<size_t>(nl));
  for (int32_t l = 0; l < nl; ++l) {
    lw[static_cast<size_t>(l)].assign(static_cast<size_t>(nwords), 0);
    boost::to_block_range(lcl[static_cast<size_t>(l)], lw[static_cast<size_t>(l)].begin());
  }

  constexpr int64_t kBlockWords = 1024;
  const int64_t nblocks = (nwords + kBlockWords - 1) / kBlockWords;
  std::vector<Accum> accs(static_cast<size_t>(nblocks));
  std::vector<std::exception_ptr> errs(static_cast<size_t>(nblocks));
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int64_t blk = 0; blk < nblocks; ++blk) {
    try {
      const int64_t w0 = blk * kBlockWords;
      const int64_t w1 = std::min(nwords, w0 + kBlockWords);
      const int64_t f0 = w0 * 64;
      const int64_t f1 = std::min(nf, w1 * 64);
      const int64_t bf = f1 - f0;
      std::vector<uint8_t> cnt(static_cast<size_t>(levels * bf), 0);
      std::vector<uint64_t> scratch(static_cast<size_t>(w1 - w0));
      for (int k = 0; k < levels; ++k) {
        uint8_t* row = cnt.data() + static_cast<size_t>(k * bf);
        for (const auto& span : an.ranges[static_cast<size_t>(k)]) {
          if (span.first == span.second) continue;
          std::fill(scratch.begin(), scratch.end(), 0);
          for (int32_t l = span.first; l < span.second; ++l) {
            const uint64_t* src = lw[static_cast<size_t>(l)].data() + w0;
            for (int64_t w = 0; w < w1 - w0; ++w) scratch[static_cast<size_t>(w)] |= src[w];
          }
          for (int64_t w = 0; w < w1 - w0; ++w) {
            uint64_t bitsw = scratch[static_cast<size_t>(w)];
            while (bitsw) {
              const int tz = std::countr_zero(bitsw);
              const int64_t f = (w0 + w) * 64 + tz - f0;
              if (row[f] != 255) ++row[f];
              bitsw &= bitsw - 1;
            }
          }
        }
      }
      Accum& acc = accs[static_cast<size_t>(blk)];
      acc.init(levels, full);
      int64_t counts[kMaxLevels];
      for (int64_t f = 0; f < bf; ++f) {
        for (int k = 0; k < levels; ++k) counts[k] = cnt[static_cast<size_t>(k * bf + f)];
        acc.emit(counts, 1, [&] { return arr.face_string(f0 + f); });
      }
    } catch (...) {
      errs[static_cast<size_t>(blk)] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  Accum total;
  total.init(levels, full);
  for (const Accum& a : accs) total.merge(a);
  assert(total.faces_seen == nf);
  return pack(total, true, nf);
}

// --------------------------------------------------------------- region ----

// Carrier faces of one final tile in global cut-index coordinates: per axis a
// closed pair (lo == hi encodes the cut {v_lo}, lo < hi the open interval
// (v_lo, v_hi)). All classification below is integer arithmetic on indices.
struct RegionLeaf {
  std::array<int32_t, 3> hlo{};  // cut-index hull of the closure
  std::array<int32_t, 3> hhi{};
  std::vector<std::array<int32_t, 6>> in_faces;   // faces of the closure
  std::vector<std::array<int32_t, 6>> out_faces;  // carrier faces outside it
};

struct RegionPrep {
  int d = 0;
  int levels = 0;
  std::array<int32_t, 3> items{};
  std::vector<std::vector<Rational>> vals;
  std::vector<RegionLeaf> leaves;
  const Ancestry* an = nullptr;
};

RegionPrep region_prep(const Tower& tw, const Ancestry& an) {
  RegionPrep P;
  P.d = tw.d;
  P.levels = static_cast<int>(tw.levels.size());
  P.vals = final_cuts(tw);
  for (int a = 0; a < tw.d; ++a)
    P.items[static_cast<size_t>(a)] = static_cast<int32_t>(2 * P.vals[static_cast<size_t>(a)].size() - 1);
  P.an = &an;
  const auto& tiles = tw.levels.back().tiles;
  P.leaves.resize(tiles.size());
  for (size_t l = 0; l < tiles.size(); ++l) {
    const RoSet c = tiles[l].compressed();
    const Arrangement& carr = *c.arr;
    std::array<std::vector<int32_t>, 3> map;
    for (int a = 0; a < tw.d; ++a) {
      map[static_cast<size_t>(a)].reserve(carr.cuts[static_cast<size_t>(a)].size());
      for (const Rational& v : carr.cuts[static_cast<size_t>(a)]) {
        const auto& gv = P.vals[static_cast<size_t>(a)];
        const auto it = std::lower_bound(gv.begin(), gv.end(), v);
        if (it == gv.end() || *it != v)
          throw Error("internal: tile carrier cut missing from the final arrangement");
        map[static_cast<size_t>(a)].push_back(static_cast<int32_t>(it - gv.begin()));
      }
    }
    const Bitset cl = carr.closure(c.faces);
    RegionLeaf& L = P.leaves[l];
    L.hlo.fill(std::numeric_limits<int32_t>::max());
    L.hhi.fill(-1);
    for (int64_t g = 0; g < carr.face_count(); ++g) {
      int32_t it[3];
      carr.decode(g, it);
      std::array<int32_t, 6> ext{};
      for (int a = 0; a < tw.d; ++a) {
        int32_t lo, hi;
        if (it[a] & 1) {
          lo = map[static_cast<size_t>(a)][static_cast<size_t>((it[a] - 1) >> 1)];
          hi = map[static_cast<size_t>(a)][static_cast<size_t>((it[a] + 1) >> 1)];
        } else {
          lo = hi = map[static_cast<size_t>(a)][static_cast<size_t>(it[a] >> 1)];
        }
        ext[static_cast<size_t>(2 * a)] = lo;
        ext[static_cast<size_t>(2 * a + 1)] = hi;
      }
      if (cl.test(static_cast<size_t>(g))) {
        L.in_faces.push_back(ext);
        for (int a = 0; a < tw.d; ++a) {
          L.hlo[static_cast<size_t>(a)] = std::min(L.hlo[static_cast<size_t>(a)], ext[static_cast<size_t>(2 * a)]);
          L.hhi[static_cast<size_t>(a)] = std::max(L.hhi[static_cast<size_t>(a)], ext[static_cast<size_t>(2 * a + 1)]);
        }
      } else {
        L.out_faces.push_back(ext);
      }
    }
  }
  return P;
}

enum class Cls { Empty, Full, Part };

inline bool face_meets_hull(const std::array<int32_t, 6>& F, const int32_t* hl, const int32_t* hh,
                            int d) {
  for (int a = 0; a < d; ++a) {
    const int32_t lo = F[static_cast<size_t>(2 * a)];
    const int32_t hi = F[static_cast<size_t>(2 * a + 1)];
    if (lo == hi) {
      if (lo < hl[a] || lo > hh[a]) return false;
    } else {
      if (!(lo < hh[a] && hl[a] < hi)) return false;
    }
  }
  return true;
}

// Exact at single-face regions: the region hull is then the closure of that
// face, a face of a refinement meets the closure either fully or not at all,
// and covering the hull decides membership.
Cls classify(const RegionLeaf& L, const int32_t* hl, const int32_t* hh, int d) {
  for (int a = 0; a < d; ++a) {
    if (L.hhi[static_cast<size_t>(a)] < hl[a] || hh[a] < L.hlo[static_cast<size_t>(a)]) return Cls::Empty;
  }
  bool covered = true;
  for (const auto& f : L.out_faces) {
    if (face_meets_hull(f, hl, hh, d)) {
      covered = false;
      break;
    }
  }
  if (covered) return Cls::Full;
  for (const auto& f : L.in_faces) {
    if (face_meets_hull(f, hl, hh, d)) return Cls::Part;
  }
  return Cls::Empty;
}

struct RegionNode {
  std::array<int32_t, 3> r0{};
  std::array<int32_t, 3> r1{};
  std::vector<int32_t> fulls;
  std::vector<int32_t> act;
};

std::string region_face_string(const RegionPrep& P, const std::array<int32_t, 3>& it) {
  std::string s;
  for (int a = 0; a < P.d; ++a) {
    if (a) s += " x ";
    const auto& v = P.vals[static_cast<size_t>(a)];
    const int32_t i = it[static_cast<size_t>(a)];
    if (i & 1) {
      s += "(" + rational_string(v[static_cast<size_t>((i - 1) >> 1)]) + "," +
           rational_string(v[static_cast<size_t>((i + 1) >> 1)]) + ")";
    } else {
      s += "{" + rational_string(v[static_cast<size_t>(i >> 1)]) + "}";
    }
  }
  return s;
}

struct RegionWalker {
  const RegionPrep* P;
  Accum acc;
  std::vector<int32_t> tmp;  // distinct-ancestor scratch

  void counts_of(const std::vector<int32_t>& fulls, int64_t* counts) {
    const Ancestry& an = *P->an;
    for (int k = 0; k < P->levels; ++k) {
      tmp.clear();
      for (int32_t l : fulls) tmp.push_back(an.anc[static_cast<size_t>(k)][static_cast<size_t>(l)]);
      std::sort(tmp.begin(), tmp.end());
      counts[k] = static_cast<int64_t>(std::unique(tmp.begin(), tmp.end()) - tmp.begin());
    }
  }

  bool prunable(const RegionNode& n, const int64_t* counts) {
    // Max-only mode. Every face in the region is covered by all full leaves
    // and by nothing outside fulls ∪ actives, so per level the fiber count
    // sits between distinct(fulls) and distinct(fulls ∪ actives). The region
    // is dead when the upper bounds cannot raise any max record and the
    // lower bounds cannot lower any min record; with a full leaf present it
    // cannot hide an empty fiber either.
    if (acc.full || n.fulls.empty()) return false;
    if (counts[P->levels - 1] < acc.min_fiber) return false;
    for (int k = 0; k < P->levels; ++k) {
      if (counts[k] < acc.mino[static_cast<size_t>(k)]) return false;
    }
    const Ancestry& an = *P->an;
    for (int k = 0; k < P->levels; ++k) {
      tmp.clear();
      for (int32_t l : n.fulls)
        tmp.push_back(an.anc[static_cast<size_t>(k)][static_cast<size_t>(l)]);
      for (int32_t l : n.act)
        tmp.push_back(an.anc[static_cast<size_t>(k)][static_cast<size_t>(l)]);
      std::sort(tmp.begin(), tmp.end());
      const int64_t ub =
          std::unique(tmp.begin(), tmp.end()) - tmp.begin();
      if (ub > acc.maxo[static_cast<size_t>(k)]) return false;
    }
    return true;
  }

  void walk(RegionNode n) {
    int64_t counts[kMaxLevels];
    for (;;) {
      int32_t hl[3], hh[3];
      bool single = true;
      for (int a = 0; a < P->d; ++a) {
        hl[a] = n.r0[static_cast<size_t>(a)] >> 1;
        hh[a] = (n.r1[static_cast<size_t>(a)] + 1) >> 1;
        single = single && n.r0[static_cast<size_t>(a)] == n.r1[static_cast<size_t>(a)];
      }
      std::vector<int32_t> part;
      part.reserve(n.act.size());
      for (int32_t l : n.act) {
        switch (classify(P->leaves[static_cast<size_t>(l)], hl, hh, P->d)) {
          case Cls::Full: n.fulls.push_back(l); break;
          case Cls::Part: part.push_back(l); break;
          case Cls::Empty: break;
        }
      }
      if (single) part.clear();
      n.act = std::move(part);
      if (n.act.empty()) {
        counts_of(n.fulls, counts);
        int64_t group = 1;
        for (int a = 0; a < P->d; ++a)
          group *= n.r1[static_cast<size_t>(a)] - n.r0[static_cast<size_t>(a)] + 1;
        acc.emit(counts, group, [&] { return region_face_string(*P, n.r0); });
        return;
      }
      counts_of(n.fulls, counts);
      if (prunable(n, counts)) return;
      int axis = 0;
      int32_t width = -1;
      for (int a = 0; a < P->d; ++a) {
        const int32_t w = n.r1[static_cast<size_t>(a)] - n.r0[static_cast<size_t>(a)];
        if (w > width) {
          width = w;
          axis = a;
        }
      }
      const int32_t mid = n.r0[static_cast<size_t>(axis)] +
                          (n.r1[static_cast<size_t>(axis)] - n.r0[static_cast<size_t>(axis)]) / 2;
      RegionNode left;
      left.r0 = n.r0;
      left.r1 = n.r1;
      left.r1[static_cast<size_t>(axis)] = mid;
      left.fulls = n.fulls;
      left.act = n.act;
      walk(std::move(left));
      n.r0[static_cast<size_t>(axis)] = mid + 1;
    }
  }
};

// Splits the root into an ordered frontier of subtrees, walks them (in
// parallel when jobs > 1) and merges the partial results in frontier order,
// which keeps every field equal to the serial walk.
TowerSweep sweep_region(const Tower& tw, const Ancestry& an, bool full, int jobs) {
  const RegionPrep P = region_prep(tw, an);
  RegionNode root;
  for (int a = 0; a < P.d; ++a) {
    root.r0[static_cast<size_t>(a)] = 0;
    root.r1[static_cast<size_t>(a)] = P.items[static_cast<size_t>(a)] - 1;
  }
  root.act.resize(P.leaves.size());
  for (size_t l = 0; l < P.leaves.size(); ++l) root.act[l] = static_cast<int32_t>(l);

  int64_t faces = 1;
  for (int a = 0; a < P.d; ++a) faces *= P.items[static_cast<size_t>(a)];

  std::vector<RegionNode> frontier;
  frontier.push_back(std::move(root));
  const size_t target = jobs > 1 ? static_cast<size_t>(4 * jobs) : 1;
  while (frontier.size() < target) {
    // Expand the widest node, keeping frontier order = DFS order.
    size_t pick = frontier.size();
    int64_t best = 1;
    for (size_t i = 0; i < frontier.size(); ++i) {
      int64_t vol = 1;
      for (int a = 0; a < P.d; ++a)
        vol *= frontier[i].r1[static_cast<size_t>(a)] - frontier[i].r0[static_cast<size_t>(a)] + 1;
      if (vol > best) {
        best = vol;
        pick = i;
      }
    }
    if (pick == frontier.size()) break;
    RegionNode n = std::move(frontier[static_cast<size_t>(pick)]);
    int axis = 0;
    int32_t width = -1;
    for (int a = 0; a < P.d; ++a) {
      const int32_t w = n.r1[static_cast<size_t>(a)] - n.r0[static_cast<size_t>(a)];
      if (w > width) {
        width = w;
        axis = a;
      }
    }
    const int32_t mid =
        n.r0[static_cast<size_t>(axis)] + (n.r1[static_cast<size_t>(axis)] - n.r0[static_cast<size_t>(axis)]) / 2;
    RegionNode right = n;
    n.r1[static_cast<size_t>(axis)] = mid;
    right.r0[static_cast<size_t>(axis)] = mid + 1;
    frontier[pick] = std::move(n);
    frontier.insert(frontier.begin() + static_cast<long>(pick) + 1, std::move(right));
  }

  std::vector<RegionWalker> walkers(frontier.size());
  std::vector<std::exception_ptr> errs(frontier.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs > 1 ? jobs : 1)
  for (int64_t i = 0; i < static_cast<int64_t>(frontier.size()); ++i) {
    try {
      walkers[static_cast<size_t>(i)].P = &P;
      walkers[static_cast<size_t>(i)].acc.init(P.levels, full);
      walkers[static_cast<size_t>(i)].walk(std::move(frontier[static_cast<size_t>(i)]));
    } catch (...) {
      errs[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  Accum total;
  total.init(P.levels, full);
  for (const RegionWalker& w : walkers) total.merge(w.acc);
  assert(!full || total.faces_seen == faces);
  return pack(total, false, faces);
}

int64_t final_face_count(const Tower& tw) {
  int64_t n = 1;
  for (const auto& c : final_cuts(tw)) n *= static_cast<int64_t>(2 * c.size() - 1);
  return n;
}

TowerSweep dispatch(const Tower& tw, const SweepOptions& opt, int jobs) {
  if (tw.levels.empty() || tw.levels.back().tiles.empty())
    throw InvalidArgument("sweep needs a tower with at least one tile");
  const Ancestry an = ancestry_of(tw);
  const int64_t faces = final_face_count(tw);
  if (!opt.force_region && faces <= opt.dense_guard) {
    const ArrangementPtr arr = Arrangement::from_cuts(tw.d, final_cuts(tw));
    return jobs > 1 ? sweep_dense_parallel(tw, an, *arr, opt.with_histogram, jobs)
                    : sweep_dense_serial(tw, an, *arr, opt.with_histogram);
  }
  return sweep_region(tw, an, opt.with_histogram, jobs);
}

}  // namespace

TowerSweep sweep_tower(const Tower& tower, const SweepOptions& opt) {
  return dispatch(tower, opt, opt.jobs);
}

TowerSweep sweep_tower_reference(const Tower& tower, const SweepOptions& opt) {
  return dispatch(tower, opt, 1);
}

}  // namespace tileres
