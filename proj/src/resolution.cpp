#include "tileres/resolution.hpp"

#include <algorithm>

#include "face_query.hpp"
#include "tileres/errors.hpp"

namespace tileres {

using facequery::closure_covers_box;

namespace {

constexpr int64_t kMaxSurjectivityFaces = int64_t(1) << 22;

}  // namespace

std::vector<std::vector<Rational>> final_cuts(const Tower& tw) {
  std::vector<std::vector<Rational>> cuts(static_cast<size_t>(tw.d));
  for (const RoSet& t : tw.levels.back().tiles)
    for (int a = 0; a < tw.d; ++a) {
      auto& c = cuts[static_cast<size_t>(a)];
      c.insert(c.end(), t.arr->cuts[a].begin(), t.arr->cuts[a].end());
    }
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return cuts;
}

ArrangementPtr final_arrangement(const Tower& tw) {
  return Arrangement::from_cuts(tw.d, final_cuts(tw));
}

std::vector<Chain> enumerate_chains(const Tower& tw) {
  const int K = tw.depth();
  std::vector<Chain> out;
  const auto leaves = tw.levels.back().tiles.size();
  out.reserve(leaves);
  for (size_t t = 0; t < leaves; ++t) {
    Chain c;
    c.tiles.assign(static_cast<size_t>(K) + 1, 0);
    c.tiles[static_cast<size_t>(K)] = static_cast<int32_t>(t);
    for (int k = K; k > 0; --k)
      c.tiles[static_cast<size_t>(k) - 1] =
          tw.parent[static_cast<size_t>(k)]
                   [static_cast<size_t>(c.tiles[static_cast<size_t>(k)])];
    out.push_back(std::move(c));
  }
  return out;
}

FiberReport fiber_of_face(const Arrangement& fine, int64_t face,
                          const Tower& tw) {
  if (fine.d != tw.d || fine.cuts != final_cuts(tw))
    throw InvalidArgument(
        "foreign face: arrangement is not the tower's final arrangement");
  if (face < 0 || face >= fine.face_count())
    throw InvalidArgument("foreign face: index out of range");

  std::vector<Rational> lo, hi;
  fine.face_extent(face, lo, hi);

  FiberReport rep;
  rep.face = face;
  std::vector<int32_t> incident;
  for (size_t k = 0; k < tw.levels.size(); ++k) {
    const auto& tiles = tw.levels[k].tiles;
    std::vector<int32_t> next;
    if (k == 0) {
      for (int32_t t = 0; t < static_cast<int32_t>(tiles.size()); ++t)
        if (closure_covers_box(tiles[static_cast<size_t>(t)], lo, hi))
          next.push_back(t);
    } else {
      // A face inside a child's closure is inside the parent's, so only
      // children of incident tiles can be incident.
      const auto& par = tw.parent[k];
      for (int32_t t = 0; t < static_cast<int32_t>(tiles.size()); ++t) {
        if (!std::binary_search(incident.begin(), incident.end(),
                                par[static_cast<size_t>(t)]))
          continue;
        if (closure_covers_box(tiles[static_cast<size_t>(t)], lo, hi))
          next.push_back(t);
      }
    }
    incident = std::move(next);
    rep.counts.push_back(static_cast<int64_t>(incident.size()));
  }
  rep.fiber = rep.counts.back();
  rep.leaves = std::move(incident);
  int k0 = static_cast<int>(rep.counts.size()) - 1;
  while (k0 > 0 && rep.counts[static_cast<size_t>(k0) - 1] == rep.fiber) --k0;
  rep.stabilization = k0;
  return rep;
}

Box resolve_chain(const Tower& tw, const Chain& c) {
  if (c.tiles.empty() || c.tiles.size() > tw.levels.size())
    throw InvalidArgument("chain length does not fit the tower");
  for (size_t k = 0; k < c.tiles.size(); ++k) {
    if (c.tiles[k] < 0 ||
        static_cast<size_t>(c.tiles[k]) >= tw.levels[k].tiles.size())
      throw InvalidArgument("chain tile index out of range");
    if (k > 0 && tw.parent[k][static_cast<size_t>(c.tiles[k])] != c.tiles[k - 1])
      throw InvalidArgument("chain does not follow the parent map");
  }
  const size_t last = c.tiles.size() - 1;
  const RoSet& t =
      tw.levels[last].tiles[static_cast<size_t>(c.tiles[last])];
  std::vector<Rational> lo, hi;
  if (!t.extent(lo, hi)) throw Error("internal: chain resolves an empty tile");
  std::vector<std::array<Rational, 2>> iv;
  for (int a = 0; a < tw.d; ++a)
    iv.push_back({lo[static_cast<size_t>(a)], hi[static_cast<size_t>(a)]});
  Box out = make_box(std::move(iv));
  if (!(out.diameter() < tw.schedule[last]))
    throw Error("internal: resolved box exceeds the schedule bound");
  return out;
}

SurjectivityReport surjectivity_check(const Tower& tw) {
  ArrangementPtr fine = final_arrangement(tw);
  if (fine->face_count() > kMaxSurjectivityFaces)
    throw GuardExceeded("surjectivity sweep arrangement too large");
  Bitset covered(static_cast<size_t>(fine->face_count()));
  for (const RoSet& t : tw.levels.back().tiles)
    covered |= fine->closure(t.faces_on(*fine));
  SurjectivityReport rep;
  if (covered.all()) {
    rep.ok = true;
    return rep;
  }
  rep.ok = false;
  rep.witness = static_cast<int64_t>(covered.flip().find_first());
  rep.what = "a face of the final arrangement has an empty fiber";
  rep.witness_face = fine->face_string(rep.witness);
  return rep;
}

}  // namespace tileres
