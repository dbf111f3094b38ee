#pragma once

#include "tileres/arrangement.hpp"

namespace tileres {

// A regular open subset of the unit cube, stored as the exact set of faces of
// a carrier arrangement it contains. The face set is canonical: it equals the
// interior of its closure, so a lower-dimensional face is a member iff every
// full-dimensional face whose closure contains it is a member. The carrier is
// kept minimal: interior cuts that carry no frontier are dropped.
struct RoSet {
  ArrangementPtr arr;
  Bitset faces;

  int dim() const { return arr->d; }
  bool empty() const { return !faces.any(); }
  bool is_whole() const { return faces.all(); }

  // Faces of cl U \ U on the carrier; all of dimension < d.
  Bitset frontier() const { return arr->closure(faces) - faces; }
  Bitset closure_faces() const { return arr->closure(faces); }

  bool contains_point(const std::vector<Rational>& x) const {
    return faces.test(static_cast<size_t>(arr->locate(x)));
  }
  bool closure_contains_point(const std::vector<Rational>& x) const {
    return arr->face_in_closure(arr->locate(x), faces);
  }

  // Closed hull per axis; false when empty.
  bool extent(std::vector<Rational>& lo, std::vector<Rational>& hi) const;
  Rational diameter() const;  // sup-metric diameter of the closure; 0 if empty

  // Closed boxes of the full-dimensional member cells (exact; used by the
  // definition-level oracles and the renderer).
  std::vector<Box> full_cells() const;

  // Same set on a minimal carrier.
  RoSet compressed() const;

  // Member faces on a finer arrangement (carrier cuts must be a subset).
  Bitset faces_on(const Arrangement& fine) const;
};

RoSet ro_empty(int d);
RoSet ro_whole(int d);

// The set Int cl(union of open_faces) as a canonical RoSet.
RoSet ro_regularize(ArrangementPtr arr, const Bitset& open_faces);

// Denotation of a box, relatively open in the cube.
RoSet ro_from_box(const Box& b);
// Same, carried by a given arrangement that already has the box's cuts.
RoSet ro_from_box_on(ArrangementPtr arr, const Box& b);

RoSet ro_join(const RoSet& u, const RoSet& v);        // Int cl(U union V)
RoSet ro_meet(const RoSet& u, const RoSet& v);        // U intersect V
RoSet ro_complement(const RoSet& u);                  // X \ cl U
bool ro_equal(const RoSet& u, const RoSet& v);
bool ro_subset(const RoSet& u, const RoSet& v);
bool ro_disjoint(const RoSet& u, const RoSet& v);

}  // namespace tileres
