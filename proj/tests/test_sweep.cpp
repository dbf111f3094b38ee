#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "tileres/base_family.hpp"
#include "tileres/resolution.hpp"
#include "tileres/sweep.hpp"
#include "tileres/tower.hpp"

using namespace tileres;

namespace {

BaseFamily sweep_base_1d(int depth, uint64_t seed) {
  std::vector<BaseFamily> parts;
  const int counts[] = {12, 20, 40};
  for (int k = 0; k <= depth; ++k) {
    parts.push_back(make_base(1, counts[k], rat(1, int64_t(1) << k), seed + static_cast<uint64_t>(k)));
  }
  return merge_bases(parts);
}

const Tower& planar_tower() {
  static const Tower tw = [] {
    std::vector<BaseFamily> parts;
    parts.push_back(make_base(2, 36, rat(1, 2), 31));
    parts.push_back(make_base(2, 200, rat(1, 4), 32));
    return build_tower(merge_bases(parts), 2);
  }();
  return tw;
}

void check_same_numbers(const TowerSweep& a, const TowerSweep& b) {
  CHECK(a.max_order == b.max_order);
  CHECK(a.max_fiber == b.max_fiber);
  CHECK(a.min_fiber == b.min_fiber);
  CHECK(a.min_order == b.min_order);
  CHECK(a.stabilization == b.stabilization);
  CHECK(a.faces == b.faces);
}

void check_same_everything(const TowerSweep& a, const TowerSweep& b) {
  check_same_numbers(a, b);
  CHECK(a.max_witness == b.max_witness);
  CHECK(a.empty_witness == b.empty_witness);
  CHECK(a.dense == b.dense);
}

int64_t witness_fiber(const Tower& tw, const std::string& witness) {
  const ArrangementPtr fine = final_arrangement(tw);
  for (int64_t f = 0; f < fine->face_count(); ++f) {
    if (fine->face_string(f) == witness) return fiber_of_face(*fine, f, tw).fiber;
  }
  return -1;
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("depth-zero sweep counts the single tile everywhere") {
  const Tower tw = build_tower(family_from_boxes(2, {}), 0);
  const TowerSweep s = sweep_tower(tw);
  CHECK(s.dense);
  CHECK(s.faces == 9);
  CHECK(s.max_order == std::vector<int64_t>{1});
  CHECK(s.min_order == std::vector<int64_t>{1});
  CHECK(s.max_fiber == 1);
  CHECK(s.min_fiber == 1);
  CHECK(s.stabilization == std::vector<std::pair<int, int64_t>>{{0, 9}});
  CHECK(!s.max_witness.empty());
  CHECK(s.empty_witness.empty());

  SweepOptions region;
  region.force_region = true;
  const TowerSweep r = sweep_tower(tw, region);
  CHECK(!r.dense);
  check_same_numbers(s, r);
}

TEST_CASE("interval sweep matches the fiber walk face by face") {
  const Tower tw = build_tower(sweep_base_1d(2, 3), 2);
  const ArrangementPtr fine = final_arrangement(tw);
  const int levels = static_cast<int>(tw.levels.size());

  std::vector<int64_t> maxo(static_cast<size_t>(levels), 0);
  std::vector<int64_t> mino(static_cast<size_t>(levels), int64_t(1) << 30);
  std::map<int, int64_t> hist;
  int64_t max_fiber = 0;
  for (int64_t f = 0; f < fine->face_count(); ++f) {
    const FiberReport rep = fiber_of_face(*fine, f, tw);
    for (int k = 0; k < levels; ++k) {
      maxo[static_cast<size_t>(k)] = std::max(maxo[static_cast<size_t>(k)], rep.counts[static_cast<size_t>(k)]);
      mino[static_cast<size_t>(k)] = std::min(mino[static_cast<size_t>(k)], rep.counts[static_cast<size_t>(k)]);
    }
    hist[rep.stabilization] += 1;
    max_fiber = std::max(max_fiber, rep.fiber);
  }
  std::string first_max;
  for (int64_t f = 0; f < fine->face_count() && first_max.empty(); ++f) {
    if (fiber_of_face(*fine, f, tw).fiber == max_fiber) first_max = fine->face_string(f);
  }

  const TowerSweep s = sweep_tower(tw);
  CHECK(s.dense);
  CHECK(s.faces == fine->face_count());
  CHECK(s.max_order == maxo);
  CHECK(s.min_order == mino);
  CHECK(s.max_fiber == max_fiber);
  CHECK(s.min_fiber == mino.back());
  CHECK(s.max_witness == first_max);
  std::vector<std::pair<int, int64_t>> hist_pairs(hist.begin(), hist.end());
  CHECK(s.stabilization == hist_pairs);

  SweepOptions region;
  region.force_region = true;
  const TowerSweep r = sweep_tower(tw, region);
  CHECK(!r.dense);
  check_same_numbers(s, r);
  CHECK(witness_fiber(tw, r.max_witness) == max_fiber);

  SweepOptions par;
  par.jobs = 4;
  check_same_everything(s, sweep_tower(tw, par));
  region.jobs = 4;
  check_same_everything(r, sweep_tower(tw, region));
}

TEST_CASE("planar kernels agree across paths and job counts") {
  const Tower& tw = planar_tower();

  const TowerSweep dense = sweep_tower_reference(tw);
  CHECK(dense.dense);
  CHECK(dense.max_fiber <= 3);
  CHECK(dense.max_fiber >= 2);
  CHECK(dense.min_fiber >= 1);
  for (int k = 0; k + 1 < static_cast<int>(dense.max_order.size()); ++k) {
    CHECK(dense.max_order[static_cast<size_t>(k)] <= dense.max_order[static_cast<size_t>(k + 1)]);
  }
  int64_t hist_total = 0;
  for (const auto& [k0, n] : dense.stabilization) hist_total += n;
  CHECK(hist_total == dense.faces);

  SweepOptions par;
  par.jobs = 4;
  check_same_everything(dense, sweep_tower(tw, par));

  SweepOptions region;
  region.force_region = true;
  const TowerSweep reg = sweep_tower_reference(tw, region);
  CHECK(!reg.dense);
  check_same_numbers(dense, reg);
  CHECK(witness_fiber(tw, reg.max_witness) == dense.max_fiber);
  region.jobs = 4;
  check_same_everything(reg, sweep_tower(tw, region));

  SweepOptions maxonly;
  maxonly.with_histogram = false;
  const TowerSweep m = sweep_tower(tw, maxonly);
  CHECK(m.max_fiber == dense.max_fiber);
  CHECK(m.min_fiber == dense.min_fiber);
  CHECK(m.max_order == dense.max_order);
  CHECK(m.min_order == dense.min_order);
  CHECK(m.stabilization.empty());
  maxonly.force_region = true;
  const TowerSweep mr = sweep_tower(tw, maxonly);
  CHECK(mr.max_fiber == dense.max_fiber);
  CHECK(mr.min_fiber == dense.min_fiber);
  CHECK(mr.max_order == dense.max_order);
  CHECK(mr.min_order == dense.min_order);
}

TEST_CASE("mutations surface in the sweep") {
  Tower broken = build_tower(sweep_base_1d(2, 9), 2);
  const size_t mid = broken.levels.back().tiles.size() / 2;
  broken.levels.back().tiles.erase(broken.levels.back().tiles.begin() + static_cast<long>(mid));
  broken.parent.back().erase(broken.parent.back().begin() + static_cast<long>(mid));

  const TowerSweep s = sweep_tower(broken);
  CHECK(s.min_fiber == 0);
  CHECK(!s.empty_witness.empty());
  SweepOptions region;
  region.force_region = true;
  const TowerSweep r = sweep_tower(broken, region);
  check_same_numbers(s, r);
  SweepOptions maxonly;
  maxonly.with_histogram = false;
  maxonly.force_region = true;
  CHECK(sweep_tower(broken, maxonly).min_fiber == 0);

  Tower overlap = build_tower(
      family_from_boxes(1, {make_box({{rat(0, 1), rat(5, 8)}}), make_box({{rat(1, 4), rat(3, 8)}}),
                            make_box({{rat(1, 2), rat(1, 1)}})}),
      1, {rat(2, 1), rat(1, 1)});
  overlap.levels.back().tiles.push_back(overlap.levels.back().tiles.back());
  overlap.parent.back().push_back(overlap.parent.back().back());
  const TowerSweep o = sweep_tower(overlap);
  CHECK(o.max_fiber == 3);
  const TowerSweep orr = sweep_tower(overlap, region);
  check_same_numbers(o, orr);
}

}  // TEST_SUITE
