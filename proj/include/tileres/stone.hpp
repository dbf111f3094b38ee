#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tileres/base_family.hpp"
#include "tileres/roset.hpp"

namespace tileres {

// Which side of each generator an ultrafilter picks: eps[a] == 1 selects the
// generator, 0 its regular-open complement.
struct UltrafilterSignature {
  std::vector<uint8_t> eps;

  bool operator==(const UltrafilterSignature& o) const { return eps == o.eps; }
  bool operator!=(const UltrafilterSignature& o) const { return eps != o.eps; }
};

// The Boolean subalgebra of the regular-open algebra generated by finitely
// many sets. Its ultrafilters are exactly the atoms, so the Stone space is
// the discrete atom list; signatures are kept parallel to atoms.
struct FiniteBooleanAlgebra {
  int d = 0;
  ArrangementPtr arr;  // common refinement of the generators' carriers
  std::vector<RoSet> generators;
  std::vector<RoSet> atoms;
  std::vector<UltrafilterSignature> signatures;
};

struct TwoPowerReport {
  bool ok = false;
  int64_t max_fiber = 0;
  std::string what;
  std::string witness_face;
};

// Meets every signature side-selection and keeps the nonempty results as
// atoms, exploring the generator side before the complement. At most 20
// generators; empty meets are dropped along with their signatures.
FiniteBooleanAlgebra generate_subalgebra(int d, std::vector<RoSet> gens);

// Signatures of the atoms whose closure contains the face (an index into
// algebra.arr), in atom order.
std::vector<UltrafilterSignature> stone_fiber(
    int64_t face, const FiniteBooleanAlgebra& algebra);

// Generators whose frontier contains the face: the set F controlling the
// fiber bound 2^{|F|}.
std::vector<int64_t> frontier_generators(int64_t face,
                                         const FiniteBooleanAlgebra& algebra);

// Face-exhaustive audit of |stone_fiber(f)| <= 2^{min(|F|, n)} with n taken
// from the base, which must pass its frontier-order check and match the
// generators element for element. Also checks that fiber members agree on
// every generator outside F. Reports the largest fiber seen.
TwoPowerReport two_power_bound_check(const BaseFamily& base,
                                     const FiniteBooleanAlgebra& algebra);

// Truth of prod(m_i) <= 2^n under the precondition sum(m_i - 1) <= n. The
// inequality is a theorem, so a false return signals a broken build.
bool product_bound_check(const std::vector<int64_t>& m, int64_t n);

}  // namespace tileres
