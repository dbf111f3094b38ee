// Rank-space shard algebra shared by the box-cover carve path and the tower
// builder's greedy cover selection.  All boxes here live on a per-call grid of
// interned axis values; comparisons are int32 rank comparisons, so the only
// rational arithmetic per carve is the initial interning pass.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tileres/box.hpp"
#include "tileres/rational.hpp"

namespace tileres::carvedetail {

// Sorted distinct axis values; rank r on axis a denotes vals[a][r].
// Rank 0 is always the value 0 and the last rank is always 1.
struct RankGrid {
  int d = 0;
  std::vector<Rational> vals[3];

  int32_t last(int a) const { return static_cast<int32_t>(vals[a].size()) - 1; }
  // v must be present (the grid is built from the same boxes it ranks).
  int32_t rank(int a, const Rational& v) const;
};

// Closed box in rank space.  lo == hi on an axis is a degenerate slab; such
// shards are kept by the coverage sweep because a leftover of any dimension
// witnesses a cover violation.
struct RankBox {
  int32_t lo[3] = {0, 0, 0};
  int32_t hi[3] = {0, 0, 0};
};

// Grid over {0,1} plus every finite endpoint of the given boxes.
RankGrid make_grid(int d, const std::vector<Box>& cells,
                   const std::vector<Box>& covers);

RankBox to_rank(const RankGrid& g, const Box& b);

// Nondegenerate overlap on every axis (closed ∩ closed has full dimension).
bool fulldim_overlap(int d, const RankBox& s, const RankBox& b);

// The closed box s meets the open denotation of b (ranks at the grid edge
// are absorbed: lo rank 0 and hi rank last behave as closed ends, matching
// boxes that touch the cube boundary).
bool meets_open(const RankGrid& g, const RankBox& s, const RankBox& b, int d);

// shards := shards minus the OPEN box b (same absorption rule).  Exact as a
// set identity; remainders may be degenerate and may share boundary slabs
// with each other.
void subtract_open(std::vector<RankBox>& shards, const RankBox& b, int d,
                   const RankGrid& g);

// shards := full-dimensional closed remainders of shards minus cl b.  Caller
// must only pass b with fulldim_overlap against the region (degenerate
// touches do not move closures and must be skipped).  The union of the
// result equals the closure of (old union minus cl b).
void subtract_closed_fulldim(std::vector<RankBox>& shards, const RankBox& b,
                             int d);

// Open-face rendering of a shard, matching Arrangement::face_string:
// "(lo,hi)" per nondegenerate axis, "{v}" per degenerate one, " x " joined.
std::string shard_string(const RankGrid& g, const RankBox& s);

// Index into shards of a maximal-dimension element (most nondegenerate axes).
std::size_t max_dim_shard(const std::vector<RankBox>& shards, int d);

}  // namespace tileres::carvedetail
