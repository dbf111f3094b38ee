#include "carve_internal.hpp"

#include <algorithm>

#include "tileres/errors.hpp"

namespace tileres::carvedetail {

int32_t RankGrid::rank(int a, const Rational& v) const {
  const auto& c = vals[a];
  auto it = std::lower_bound(c.begin(), c.end(), v);
  if (it == c.end() || *it != v)
    throw Error("internal: value missing from rank grid");
  return static_cast<int32_t>(it - c.begin());
}

RankGrid make_grid(int d, const std::vector<Box>& cells,
                   const std::vector<Box>& covers) {
  RankGrid g;
  g.d = d;
  for (int a = 0; a < d; ++a) {
    auto& c = g.vals[a];
    c.push_back(Rational(0));
    c.push_back(Rational(1));
    for (const auto& b : cells) {
      c.push_back(b.lo(a));
      c.push_back(b.hi(a));
    }
    for (const auto& b : covers) {
      c.push_back(b.lo(a));
      c.push_back(b.hi(a));
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return g;
}

RankBox to_rank(const RankGrid& g, const Box& b) {
  RankBox r;
  for (int a = 0; a < g.d; ++a) {
    r.lo[a] = g.rank(a, b.lo(a));
    r.hi[a] = g.rank(a, b.hi(a));
  }
  return r;
}

bool fulldim_overlap(int d, const RankBox& s, const RankBox& b) {
  for (int a = 0; a < d; ++a)
    if (std::min(s.hi[a], b.hi[a]) <= std::max(s.lo[a], b.lo[a])) return false;
  return true;
}

namespace {

// [s.lo, s.hi] meets the open interval (b.lo, b.hi) on axis a, where rank 0
// and the last rank are absorbed (closed) ends.
bool meets_open_axis(const RankGrid& g, const RankBox& s, const RankBox& b,
                     int a) {
  bool lo_ok = s.hi[a] > b.lo[a] || b.lo[a] == 0;
  bool hi_ok = s.lo[a] < b.hi[a] || b.hi[a] == g.last(a);
  return lo_ok && hi_ok;
}

}  // namespace

bool meets_open(const RankGrid& g, const RankBox& s, const RankBox& b, int d) {
  for (int a = 0; a < d; ++a)
    if (!meets_open_axis(g, s, b, a)) return false;
  return true;
}

void subtract_open(std::vector<RankBox>& shards, const RankBox& b, int d,
                   const RankGrid& g) {
  std::vector<RankBox> out;
  out.reserve(shards.size());
  for (const auto& s : shards) {
    bool meets = true;
    for (int a = 0; a < d && meets; ++a)
      meets = meets_open_axis(g, s, b, a);
    if (!meets) {
      out.push_back(s);
      continue;
    }
    // Staircase split.  The running box is clipped to the CLOSED span of b
    // axis by axis; the side pieces use <= / >=, so the frontier shell of b
    // inside s stays in the output and only the open core is discarded.
    RankBox cur = s;
    for (int a = 0; a < d; ++a) {
      if (b.lo[a] != 0 && cur.lo[a] <= b.lo[a]) {
        RankBox piece = cur;
        piece.hi[a] = b.lo[a];
        out.push_back(piece);
      }
      if (b.hi[a] != g.last(a) && cur.hi[a] >= b.hi[a]) {
        RankBox piece = cur;
        piece.lo[a] = b.hi[a];
        out.push_back(piece);
      }
      cur.lo[a] = std::max(cur.lo[a], b.lo[a]);
      cur.hi[a] = std::min(cur.hi[a], b.hi[a]);
      if (cur.lo[a] > cur.hi[a]) break;  // b misses s here: nothing discarded
    }
  }
  shards.swap(out);
}

void subtract_closed_fulldim(std::vector<RankBox>& shards, const RankBox& b,
                             int d) {
  std::vector<RankBox> out;
  out.reserve(shards.size());
  for (const auto& s : shards) {
    if (!fulldim_overlap(d, s, b)) {
      out.push_back(s);
      continue;
    }
    RankBox cur = s;
    for (int a = 0; a < d; ++a) {
      if (cur.lo[a] < b.lo[a]) {
        RankBox piece = cur;
        piece.hi[a] = b.lo[a];
        out.push_back(piece);
      }
      if (cur.hi[a] > b.hi[a]) {
        RankBox piece = cur;
        piece.lo[a] = b.hi[a];
        out.push_back(piece);
      }
      cur.lo[a] = std::max(cur.lo[a], b.lo[a]);
      cur.hi[a] = std::min(cur.hi[a], b.hi[a]);
    }
  }
  shards.swap(out);
}

std::string shard_string(const RankGrid& g, const RankBox& s) {
  std::string r;
  for (int a = 0; a < g.d; ++a) {
    if (a) r += " x ";
    if (s.lo[a] == s.hi[a]) {
      r += "{" + rational_string(g.vals[a][s.lo[a]]) + "}";
    } else {
      r += "(" + rational_string(g.vals[a][s.lo[a]]) + "," +
           rational_string(g.vals[a][s.hi[a]]) + ")";
    }
  }
  return r;
}

std::size_t max_dim_shard(const std::vector<RankBox>& shards, int d) {
  std::size_t best = 0;
  int best_dim = -1;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    int dim = 0;
    for (int a = 0; a < d; ++a) dim += shards[i].lo[a] < shards[i].hi[a];
    if (dim > best_dim) {
      best_dim = dim;
      best = i;
    }
  }
  return best;
}

}  // namespace tileres::carvedetail
