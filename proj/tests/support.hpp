#pragma once

// Reference computations written independently of the library, plus random
// generators for the property tests.

#include "mars/mars.hpp"

#include <map>
#include <random>
#include <set>
#include <vector>

namespace ref {

using mars::Int;
using mars::IntVec;
using mars::ProblemSpec;

inline Int fdiv(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

inline Int fmod(Int a, Int b) { return a - fdiv(a, b) * b; }

inline Int dotp(const IntVec &a, const IntVec &b) {
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

inline IntVec plus(const IntVec &a, const IntVec &b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = a[i] + b[i];
  return r;
}

inline IntVec minus(const IntVec &a, const IntVec &b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = a[i] - b[i];
  return r;
}

inline IntVec tile_of(const IntVec &x, const ProblemSpec &spec) {
  IntVec t;
  for (const auto &h : spec.hyperplanes)
    t.push_back(fdiv(dotp(h.normal, x), h.tile_size));
  return t;
}

inline bool in_domain(const IntVec &x, const ProblemSpec &spec) {
  if (!spec.domain)
    return true;
  for (std::size_t d = 0; d < x.size(); ++d)
    if (x[d] < spec.domain->lower[d] || x[d] > spec.domain->upper[d])
      return false;
  return true;
}

using Sig = std::set<IntVec>;

/// Offsets of the tiles consuming x.
inline Sig signature(const IntVec &x, const ProblemSpec &spec) {
  Sig s;
  const IntVec t = tile_of(x, spec);
  for (const auto &b : spec.dependences) {
    const IntVec y = plus(x, b);
    if (!in_domain(y, spec))
      continue;
    const IntVec u = tile_of(y, spec);
    if (u != t)
      s.insert(minus(u, t));
  }
  return s;
}

inline Sig to_sig(const mars::ConsumerSignature &c) {
  Sig s;
  for (const auto &o : c.tiles())
    s.insert(IntVec(o.offsets.begin(), o.offsets.end()));
  return s;
}

/// Points of a tile, found by scanning a box and testing tile membership with
/// the reference floor division. The box is the library's bounding box grown
/// by two; a member on the grown border means the box was too small.
inline std::vector<IntVec> tile_points(const ProblemSpec &spec, const IntVec &tile) {
  auto box = mars::tile_bounding_box(spec, mars::TileCoord{tile});
  if (!box)
    throw std::runtime_error("unbounded tile");
  for (auto &v : box->lower)
    v -= 2;
  for (auto &v : box->upper)
    v += 2;
  std::vector<IntVec> pts;
  mars::for_each_box_point(*box, [&](const IntVec &x) {
    if (tile_of(x, spec) != tile || !in_domain(x, spec))
      return;
    for (std::size_t d = 0; d < x.size(); ++d)
      if (x[d] == box->lower[d] || x[d] == box->upper[d])
        throw std::runtime_error("scan box too small");
    pts.push_back(x);
  });
  return pts;
}

using Blocks = std::map<Sig, std::set<IntVec>>;

inline Blocks blocks(const ProblemSpec &spec, const IntVec &tile) {
  Blocks out;
  for (const auto &x : tile_points(spec, tile)) {
    auto s = signature(x, spec);
    if (!s.empty())
      out[s].insert(x);
  }
  return out;
}

inline Blocks to_blocks(const mars::oracle::Partition &p) {
  Blocks out;
  for (const auto &[sig, pts] : p)
    out[to_sig(sig)] = pts;
  return out;
}

} // namespace ref

namespace gen {

using mars::Int;
using mars::IntVec;

inline IntVec vec(std::mt19937 &rng, std::size_t n, Int lo, Int hi) {
  std::uniform_int_distribution<Int> d(lo, hi);
  IntVec v(n);
  for (auto &x : v)
    x = d(rng);
  return v;
}

inline IntVec nonzero_vec(std::mt19937 &rng, std::size_t n, Int lo, Int hi) {
  while (true) {
    IntVec v = vec(rng, n, lo, hi);
    for (Int x : v)
      if (x != 0)
        return v;
  }
}

/// Random residue atom on a small linear form.
inline mars::ResidueInterval residue(std::mt19937 &rng, std::size_t n) {
  std::uniform_int_distribution<Int> mod(2, 5);
  const Int s = mod(rng);
  std::uniform_int_distribution<Int> r(0, s - 1);
  Int lo = r(rng), hi = r(rng);
  if (lo > hi)
    std::swap(lo, hi);
  return {nonzero_vec(rng, n, -2, 2), s, lo, hi};
}

inline mars::AffineIneq affine(std::mt19937 &rng, std::size_t n) {
  return {nonzero_vec(rng, n, -2, 2), std::uniform_int_distribution<Int>(-6, 6)(rng)};
}

inline mars::QSet qset(std::mt19937 &rng, std::size_t n, bool with_affine = true) {
  std::uniform_int_distribution<int> count(0, 3), atoms(1, 3), coin(0, 3);
  mars::QSet s(n);
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    mars::Conjunct c;
    const int a = atoms(rng);
    for (int j = 0; j < a; ++j) {
      if (with_affine && coin(rng) == 0)
        c.add(affine(rng, n));
      else
        c.add(residue(rng, n));
    }
    s.push(std::move(c));
  }
  return s;
}

} // namespace gen
