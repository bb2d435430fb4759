#pragma once

/// Brute-force ground truth. Everything here works on explicit lattice points
/// and compares tile coordinates directly; it never looks at residues or at
/// the symbolic sets, so it can be used to check them.

#include "mars/core_model.hpp"

#include <map>
#include <set>

namespace mars::oracle {

using PointSet = std::set<IntVec>;
using Partition = std::map<ConsumerSignature, PointSet>;

inline NeighborOffset offset_between(const TileCoord &from, const TileCoord &to) {
  NeighborOffset o;
  o.offsets.reserve(from.coords.size());
  for (std::size_t k = 0; k < from.coords.size(); ++k) {
    const Int d = to.coords[k] - from.coords[k];
    if (d != 0 && d != 1)
      throw Error(ErrorCode::LongDependence,
                  "tile offset component " + std::to_string(d) +
                      " outside {0,1}");
    o.offsets.push_back(static_cast<std::uint8_t>(d));
  }
  return o;
}

/// True iff `x + b` lies in a different slab of family `k` than `x`.
inline bool crosses(std::span<const Int> x, std::span<const Int> b,
                    std::size_t k, const ProblemSpec &spec) {
  const auto &h = spec.hyperplanes[k];
  return floor_div(dot(h.normal, add(x, b)), h.tile_size) !=
         floor_div(dot(h.normal, x), h.tile_size);
}

/// Tiles other than x's own that read x's value.
inline ConsumerSignature consumer_signature(std::span<const Int> x,
                                            const ProblemSpec &spec) {
  const TileCoord own = tile_coord(x, spec);
  ConsumerSignature sig;
  for (const auto &b : spec.dependences) {
    const IntVec y = add(x, b);
    if (!spec.in_domain(y))
      continue;
    const TileCoord other = tile_coord(y, spec);
    if (other != own)
      sig.insert(offset_between(own, other));
  }
  return sig;
}

/// Tiles other than x's own whose values x reads, as offsets from the
/// producer to x's tile.
inline ConsumerSignature producer_signature(std::span<const Int> x,
                                            const ProblemSpec &spec) {
  const TileCoord own = tile_coord(x, spec);
  ConsumerSignature sig;
  for (const auto &b : spec.dependences) {
    const IntVec y = sub(x, b);
    if (!spec.in_domain(y))
      continue;
    const TileCoord other = tile_coord(y, spec);
    if (other != own)
      sig.insert(offset_between(other, own));
  }
  return sig;
}

/// Domain points of one tile in lexicographic order.
inline std::vector<IntVec> tile_points(const ProblemSpec &spec,
                                       const TileCoord &tile) {
  auto pts = tile_lattice_points(spec, tile);
  std::erase_if(pts, [&](const IntVec &x) { return !spec.in_domain(x); });
  if (pts.empty())
    throw Error(ErrorCode::EmptyTile, "tile has no domain point");
  return pts;
}

/// Representative tile: `2*(1,...,1)` for infinite domains, otherwise the
/// lexicographically first tile lying entirely inside the domain box.
inline TileCoord sample_tile(const ProblemSpec &spec) {
  const std::size_t t = spec.hyperplanes.size();
  if (!spec.domain)
    return TileCoord{IntVec(t, 2)};
  const auto &box = *spec.domain;
  IntVec lo(t), hi(t);
  for (std::size_t k = 0; k < t; ++k) {
    const auto &h = spec.hyperplanes[k];
    Int vmin = 0, vmax = 0;
    for (std::size_t d = 0; d < spec.dim; ++d) {
      const Int a = h.normal[d] * box.lower[d], b = h.normal[d] * box.upper[d];
      vmin += std::min(a, b);
      vmax += std::max(a, b);
    }
    lo[k] = floor_div(vmin, h.tile_size);
    hi[k] = floor_div(vmax, h.tile_size);
  }
  // Iterate with the first family as the most significant digit.
  TileCoord tile{lo};
  while (true) {
    if (tile_fully_inside(spec, tile, box))
      return tile;
    std::size_t k = t;
    while (k > 0) {
      --k;
      if (tile.coords[k] < hi[k]) {
        ++tile.coords[k];
        break;
      }
      tile.coords[k] = lo[k];
      if (k == 0)
        throw Error(ErrorCode::EmptyDomain, "domain box contains no full tile");
    }
  }
}

inline PointSet flow_out(const ProblemSpec &spec, const TileCoord &tile) {
  PointSet out;
  for (const auto &x : tile_points(spec, tile))
    if (!consumer_signature(x, spec).empty())
      out.insert(x);
  return out;
}

/// Points outside the tile that the tile reads.
inline PointSet flow_in(const ProblemSpec &spec, const TileCoord &tile) {
  PointSet in;
  for (const auto &x : tile_points(spec, tile))
    for (const auto &b : spec.dependences) {
      IntVec y = sub(x, b);
      if (spec.in_domain(y) && tile_coord(y, spec) != tile)
        in.insert(std::move(y));
    }
  return in;
}

/// Points inside the tile that read at least one value produced elsewhere.
inline PointSet reader_points(const ProblemSpec &spec, const TileCoord &tile) {
  PointSet out;
  for (const auto &x : tile_points(spec, tile))
    if (!producer_signature(x, spec).empty())
      out.insert(x);
  return out;
}

/// Flow-out of `tile` grouped by exact consumer signature.
inline Partition mars(const ProblemSpec &spec, const TileCoord &tile) {
  Partition part;
  for (const auto &x : tile_points(spec, tile)) {
    auto sig = consumer_signature(x, spec);
    if (!sig.empty())
      part[std::move(sig)].insert(x);
  }
  return part;
}

/// Reader points of `tile` grouped by exact producer signature.
inline Partition mars_in(const ProblemSpec &spec, const TileCoord &tile) {
  Partition part;
  for (const auto &x : tile_points(spec, tile)) {
    auto sig = producer_signature(x, spec);
    if (!sig.empty())
      part[std::move(sig)].insert(x);
  }
  return part;
}

/// For each consumer tile, the points of `tile` it reads.
inline std::map<NeighborOffset, PointSet> reads_by_consumer(const ProblemSpec &spec,
                                                            const TileCoord &tile) {
  std::map<NeighborOffset, PointSet> reads;
  for (const auto &x : tile_points(spec, tile)) {
    const auto sig = consumer_signature(x, spec);
    for (const auto &o : sig.tiles())
      reads[o].insert(x);
  }
  return reads;
}

} // namespace mars::oracle
