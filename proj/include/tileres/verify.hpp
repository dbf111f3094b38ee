#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tileres/base_family.hpp"
#include "tileres/sweep.hpp"
#include "tileres/tower.hpp"

namespace tileres {

// Exact sample points inside one face: the centroid first, then seeded
// perturbations. Cut axes keep the cut value, interval axes stay strictly
// between the bounds, so every point lies in the face by construction.
struct SamplePlan {
  int64_t face = -1;
  std::vector<std::vector<Rational>> points;
};

// One plan per face of the arrangement, `per_face` points each (the centroid
// plus per_face - 1 perturbations), deterministic in (seed, face) and
// independent of iteration order. Requires an enumerable arrangement.
std::vector<SamplePlan> make_sample_plan(const Arrangement& arr, int per_face,
                                         uint64_t seed);

// Definition-level point predicates. They recompute cl S as the union of the
// closed full-dimensional cells and decide Int cl S by probing an exact
// neighborhood of x fine enough to separate every cell facet, using nothing
// but coordinate comparisons. The canonical face algebra never enters, so a
// set whose stored face bits disagree with its own cell geometry is exactly
// what these flag.
bool oracle_membership(const std::vector<Rational>& x, const RoSet& S);  // x in Int cl S
bool oracle_closure(const std::vector<Rational>& x, const RoSet& S);     // x in cl S
bool oracle_frontier(const std::vector<Rational>& x, const RoSet& S);    // x in cl S \ Int cl S

// Exhaustive oracle agreement for one set: canonical membership and frontier
// verdicts against the definition-level oracles, on samples_per_face points
// (centroid plus perturbations) of every carrier face. The sampling matches
// make_sample_plan; the point tests share one amortized table per set, so
// this is the entry for sweeping many faces.
struct OracleAgreement {
  bool ok = true;
  int64_t faces = 0;
  int64_t samples = 0;
  std::string witness;  // first disagreeing face and point
};
OracleAgreement oracle_cross_check(const RoSet& S, int samples_per_face,
                                   uint64_t seed);

struct VerifyFailure {
  std::string check;    // failed invariant, e.g. "tile-canonical"
  int level = -1;       // tower level, when one applies
  int64_t index = -1;   // tile, step, or chain index, when one applies
  std::string witness;  // face, point, or index description
};

struct VerifyOptions {
  int jobs = 1;
  int samples_per_face = 3;   // oracle samples per face, centroid included
  uint64_t seed = 0x5eedULL;  // perturbation seed for the sample plans
  int64_t max_failures = 64;  // cap on collected entries; checking continues
};

struct VerifyReport {
  bool ok = true;
  int64_t faces_checked = 0;    // faces visited across the exhaustive sweeps
  int64_t samples_checked = 0;  // oracle sample points compared
  int64_t failures_dropped = 0; // failures past the max_failures cap
  TowerSweep sweep;             // tower-wide incidence bounds backing the face checks
  std::vector<VerifyFailure> failures;
};

// Every tower invariant, exhaustively over faces. Structure (level, parent,
// step, and budget bookkeeping), the base frontier-order property, per tile
// nonemptiness, canonical form, and the diameter schedule, per step the
// decomposition of the parent into children inside their covers with both
// refinement lemmas, per level pairwise disjointness and, when the merged
// carrier is enumerable, the full tiling check with the budget sweep, the
// order and fiber bounds from an exhaustive tower sweep, chain enumeration
// against resolution, and oracle cross-checks of membership and frontier
// verdicts on sampled faces of every tile's carrier. Invariant violations
// become report entries with witnesses; only malformed calls throw.
VerifyReport verify_tower(const Tower& tower, const BaseFamily& base,
                          const VerifyOptions& opt = {});

struct LemmaViolation {
  int level = 0;        // level of the refined parent tile
  int32_t parent = 0;   // index of the parent at that level
  int lemma = 0;        // 1 = non-maximal frontier containment, 2 = budget count
  std::string witness;  // face where the inequality fails
};

struct LemmaReport {
  bool ok = true;
  int64_t steps_checked = 0;
  int64_t faces_checked = 0;
  std::vector<LemmaViolation> violations;
};

// Exhaustive sweep of both refinement lemmas at every recorded step, over
// every face of the step's own refinement arrangement (parent, children, and
// cover coordinates together). At each face, every non-maximal incident
// child must lie on the frontier of its own cover, and the number of
// incident children minus one is bounded by the number of step covers whose
// frontier passes through the face. The base supplies the boxes the recorded
// cover indices refer to.
LemmaReport lemma_sweeps(const Tower& tower, const BaseFamily& base,
                         int jobs = 1);

}  // namespace tileres
