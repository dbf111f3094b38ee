#include "tileres/stone.hpp"

#include <algorithm>

#include "face_query.hpp"
#include "tileres/errors.hpp"

namespace tileres {

namespace {

constexpr size_t kMaxGenerators = 20;

void atom_dfs(const std::vector<RoSet>& gens, const std::vector<RoSet>& cogens,
              size_t alpha, const RoSet& cur, UltrafilterSignature& sig,
              FiniteBooleanAlgebra& out) {
  if (cur.empty()) return;  // every extension of an empty meet stays empty
  if (alpha == gens.size()) {
    out.atoms.push_back(cur.compressed());
    out.signatures.push_back(sig);
    return;
  }
  sig.eps[alpha] = 1;
  atom_dfs(gens, cogens, alpha + 1, ro_meet(cur, gens[alpha]), sig, out);
  sig.eps[alpha] = 0;
  atom_dfs(gens, cogens, alpha + 1, ro_meet(cur, cogens[alpha]), sig, out);
}

}  // namespace

FiniteBooleanAlgebra generate_subalgebra(int d, std::vector<RoSet> gens) {
  if (d < 1 || d > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (gens.size() > kMaxGenerators)
    throw GuardExceeded("subalgebra guard: more than 20 generators");
  for (const RoSet& g : gens)
    if (g.dim() != d) throw InvalidArgument("generator dimension mismatch");

  FiniteBooleanAlgebra out;
  out.d = d;
  std::vector<std::vector<Rational>> cuts(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    auto& c = cuts[static_cast<size_t>(a)];
    c.push_back(Rational(0));
    c.push_back(Rational(1));
    for (const RoSet& g : gens)
      c.insert(c.end(), g.arr->cuts[a].begin(), g.arr->cuts[a].end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  out.arr = Arrangement::from_cuts(d, std::move(cuts));

  std::vector<RoSet> cogens;
  cogens.reserve(gens.size());
  for (const RoSet& g : gens) cogens.push_back(ro_complement(g));

  UltrafilterSignature sig;
  sig.eps.assign(gens.size(), 0);
  atom_dfs(gens, cogens, 0, ro_whole(d), sig, out);
  out.generators = std::move(gens);
  return out;
}

std::vector<UltrafilterSignature> stone_fiber(
    int64_t face, const FiniteBooleanAlgebra& alg) {
  if (!alg.arr) throw InvalidArgument("algebra has no arrangement");
  if (face < 0 || face >= alg.arr->face_count())
    throw InvalidArgument("foreign face: index out of range");
  std::vector<Rational> lo, hi;
  alg.arr->face_extent(face, lo, hi);
  std::vector<UltrafilterSignature> out;
  for (size_t i = 0; i < alg.atoms.size(); ++i)
    if (facequery::closure_covers_box(alg.atoms[i], lo, hi))
      out.push_back(alg.signatures[i]);
  return out;
}

std::vector<int64_t> frontier_generators(int64_t face,
                                         const FiniteBooleanAlgebra& alg) {
  if (!alg.arr) throw InvalidArgument("algebra has no arrangement");
  if (face < 0 || face >= alg.arr->face_count())
    throw InvalidArgument("foreign face: index out of range");
  // The common arrangement refines every generator carrier, so the face
  // sits inside a single carrier face and its centroid decides membership.
  const std::vector<Rational> c = alg.arr->face_centroid(face);
  std::vector<int64_t> out;
  for (size_t a = 0; a < alg.generators.size(); ++a) {
    const RoSet& g = alg.generators[a];
    if (g.closure_contains_point(c) && !g.contains_point(c))
      out.push_back(static_cast<int64_t>(a));
  }
  return out;
}

TwoPowerReport two_power_bound_check(const BaseFamily& base,
                                     const FiniteBooleanAlgebra& alg) {
  BaseCheck bc = check_base_property(base);
  if (!bc.ok)
    throw InvalidArgument("base fails the frontier order property");
  if (static_cast<size_t>(base.size()) != alg.generators.size())
    throw InvalidArgument("algebra generators do not match the base");
  for (int64_t i = 0; i < base.size(); ++i)
    if (!ro_equal(alg.generators[static_cast<size_t>(i)], base.element(i)))
      throw InvalidArgument("algebra generators do not match the base");

  const Arrangement& arr = *alg.arr;
  const auto nfaces = static_cast<size_t>(arr.face_count());
  const size_t g = alg.generators.size();
  const size_t natoms = alg.atoms.size();
  const int64_t n = base.n;

  // Everything is a union of faces of the common arrangement, so membership
  // reduces to per-face bits.
  std::vector<Bitset> gen_in(g), gen_cl(g);
  for (size_t a = 0; a < g; ++a) {
    gen_in[a] = alg.generators[a].faces_on(arr);
    gen_cl[a] = arr.closure(gen_in[a]);
  }
  std::vector<Bitset> atom_cl(natoms);
  for (size_t i = 0; i < natoms; ++i)
    atom_cl[i] = arr.closure(alg.atoms[i].faces_on(arr));

  TwoPowerReport rep;
  rep.ok = true;
  std::vector<size_t> fiber;
  for (size_t f = 0; f < nfaces; ++f) {
    int64_t nf = 0;
    for (size_t a = 0; a < g; ++a)
      if (gen_cl[a].test(f) && !gen_in[a].test(f)) ++nf;
    fiber.clear();
    for (size_t i = 0; i < natoms; ++i)
      if (atom_cl[i].test(f)) fiber.push_back(i);
    const auto size = static_cast<int64_t>(fiber.size());
    rep.max_fiber = std::max(rep.max_fiber, size);
    const int64_t bound = int64_t(1) << std::min(nf, n);
    if (size > bound) {
      rep.ok = false;
      rep.what = "stone fiber exceeds the two-power bound";
      rep.witness_face = arr.face_string(static_cast<int64_t>(f));
      return rep;
    }
    // Fiber members may only disagree inside F.
    for (size_t i = 1; i < fiber.size(); ++i)
      for (size_t a = 0; a < g; ++a) {
        if (gen_cl[a].test(f) && !gen_in[a].test(f)) continue;
        if (alg.signatures[fiber[i]].eps[a] !=
            alg.signatures[fiber[0]].eps[a]) {
          rep.ok = false;
          rep.what = "stone fiber members disagree outside the frontier set";
          rep.witness_face = arr.face_string(static_cast<int64_t>(f));
          return rep;
        }
      }
  }
  return rep;
}

bool product_bound_check(const std::vector<int64_t>& m, int64_t n) {
  if (n < 0) throw InvalidArgument("the exponent must be nonnegative");
  BigInt slack = 0;
  for (int64_t mi : m) {
    if (mi < 1) throw InvalidArgument("factors must be positive");
    slack += mi - 1;
  }
  if (slack > n)
    throw InvalidArgument("lemma precondition sum(m_i - 1) <= n violated");
  BigInt prod = 1;
  for (int64_t mi : m) prod *= mi;
  // prod <= 2^n without materializing the power: compare bit positions.
  const auto top = static_cast<int64_t>(boost::multiprecision::msb(prod));
  if (top != n) return top < n;
  return (prod & (prod - 1)) == 0;
}

}  // namespace tileres
