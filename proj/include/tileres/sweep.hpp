#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tileres/tower.hpp"

namespace tileres {

struct SweepOptions {
  int jobs = 1;                // OpenMP width; <= 1 runs the serial kernels
  bool with_histogram = true;  // full per-level stats; false = max/min only, with pruning
  int64_t dense_guard = int64_t(1) << 22;  // largest face count the dense kernel enumerates
  bool force_region = false;               // testing hook: region kernel even when dense fits
};

// Exhaustive incidence statistics over the faces of the tower's final
// arrangement. Counts are derived from the final-level tile closures through
// the parent map, so on an intact tower count_k(f) = |{T at level k : f in cl T}|.
struct TowerSweep {
  std::vector<int64_t> max_order;  // per level
  std::vector<int64_t> min_order;  // per level; min_order[k] >= 1 iff level k covers X
  int64_t max_fiber = 0;           // = max_order.back()
  int64_t min_fiber = 0;           // 0 means some face has an empty fiber
  // Face counts per stabilization level, sorted by level. Filled only with
  // with_histogram; the other fields are exact in both modes.
  std::vector<std::pair<int, int64_t>> stabilization;
  std::string max_witness;    // first face attaining max_fiber, in sweep order
  std::string empty_witness;  // a face with an empty fiber, when min_fiber == 0
  bool dense = false;         // which kernel ran
  int64_t faces = 0;          // face count of the final arrangement
};

// Dense kernel when the final arrangement is enumerable, region kernel
// otherwise. opt.jobs > 1 runs the OpenMP variants; every field except the
// kernel choice is independent of the job count.
TowerSweep sweep_tower(const Tower& tower, const SweepOptions& opt = {});

// Straight-line single-threaded loops, kept as the reference the parallel
// kernels are tested and benchmarked against.
TowerSweep sweep_tower_reference(const Tower& tower, const SweepOptions& opt = {});

}  // namespace tileres
