// Shared helpers for property tests: deterministic RNG and random geometry.
#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "tileres/arrangement.hpp"
#include "tileres/box.hpp"
#include "tileres/rational.hpp"
#include "tileres/roset.hpp"

namespace tt {

using tileres::Arrangement;
using tileres::ArrangementPtr;
using tileres::Bitset;
using tileres::Box;
using tileres::Rational;
using tileres::RoSet;

inline std::uint64_t rand_below(std::mt19937_64& g, std::uint64_t n) {
  // Unbiased bounded draw; result is stable across platforms.
  const std::uint64_t lim = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do { v = g(); } while (v >= lim);
  return v % n;
}

// Rational strictly inside (0,1) with a small denominator.
inline Rational rand_unit_rational(std::mt19937_64& g, std::uint64_t max_den = 64) {
  const std::uint64_t den = 2 + rand_below(g, max_den - 1);
  const std::uint64_t num = 1 + rand_below(g, den - 1);
  return tileres::rat(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

inline Box rand_box(std::mt19937_64& g, int d, std::uint64_t max_den = 64) {
  std::vector<std::array<Rational, 2>> iv(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    Rational x = rand_unit_rational(g, max_den);
    Rational y = rand_unit_rational(g, max_den);
    while (y == x) y = rand_unit_rational(g, max_den);
    iv[static_cast<std::size_t>(a)] = {std::min(x, y), std::max(x, y)};
  }
  return tileres::make_box(std::move(iv));
}

// Random canonical set: regularize a random subset of faces of a random box arrangement.
inline RoSet rand_roset(std::mt19937_64& g, int d, int nboxes = 3, std::uint64_t max_den = 16) {
  std::vector<Box> boxes;
  for (int i = 0; i < nboxes; ++i) boxes.push_back(rand_box(g, d, max_den));
  ArrangementPtr arr = Arrangement::from_boxes(d, boxes);
  Bitset bits(static_cast<std::size_t>(arr->nfaces));
  for (std::size_t f = 0; f < bits.size(); ++f)
    if (rand_below(g, 2) == 1) bits.set(f);
  return tileres::ro_regularize(arr, bits);
}

}  // namespace tt
