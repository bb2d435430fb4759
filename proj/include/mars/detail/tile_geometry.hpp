#pragma once

#include "mars/core_model.hpp"

#include <cmath>
#include <functional>

namespace mars {

/// Tile coordinates of a point: `floor(normal_k . x / size_k)` per family.
inline TileCoord tile_coord(std::span<const Int> x, const ProblemSpec &spec) {
  TileCoord t;
  t.coords.reserve(spec.hyperplanes.size());
  for (const auto &h : spec.hyperplanes)
    t.coords.push_back(floor_div(dot(h.normal, x), h.tile_size));
  return t;
}

namespace detail {

/// Indices of a maximal linearly independent subset of the normals, greedy
/// in declaration order.
inline std::vector<std::size_t> independent_normals(const ProblemSpec &spec) {
  const std::size_t n = spec.dim;
  std::vector<std::vector<double>> basis; // row-echelon rows
  std::vector<std::size_t> pivots;
  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < spec.hyperplanes.size() && chosen.size() < n;
       ++k) {
    std::vector<double> row(spec.hyperplanes[k].normal.begin(),
                            spec.hyperplanes[k].normal.end());
    for (std::size_t r = 0; r < basis.size(); ++r) {
      const double f = row[pivots[r]] / basis[r][pivots[r]];
      for (std::size_t d = 0; d < n; ++d)
        row[d] -= f * basis[r][d];
    }
    std::size_t p = n;
    for (std::size_t d = 0; d < n; ++d)
      if (std::abs(row[d]) > 1e-9) {
        p = d;
        break;
      }
    if (p == n)
      continue;
    basis.push_back(row);
    pivots.push_back(p);
    chosen.push_back(k);
  }
  return chosen;
}

/// Inverse of a small dense matrix by Gauss-Jordan with partial pivoting.
inline std::vector<std::vector<double>>
invert(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c]))
        p = r;
    std::swap(a[c], a[p]);
    std::swap(inv[c], inv[p]);
    const double piv = a[c][c];
    for (std::size_t d = 0; d < n; ++d) {
      a[c][d] /= piv;
      inv[c][d] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0)
        continue;
      const double f = a[r][c];
      for (std::size_t d = 0; d < n; ++d) {
        a[r][d] -= f * a[c][d];
        inv[r][d] -= f * inv[c][d];
      }
    }
  }
  return inv;
}

} // namespace detail

inline std::optional<DomainBox> tile_bounding_box(const ProblemSpec &spec,
                                                  const TileCoord &tile) {
  const std::size_t n = spec.dim;
  const auto chosen = detail::independent_normals(spec);
  if (chosen.size() < n)
    return std::nullopt;
  std::vector<std::vector<double>> m;
  for (std::size_t k : chosen)
    m.emplace_back(spec.hyperplanes[k].normal.begin(),
                   spec.hyperplanes[k].normal.end());
  const auto inv = detail::invert(m);
  std::vector<double> lo(n, INFINITY), hi(n, -INFINITY);
  for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto &h = spec.hyperplanes[chosen[r]];
      const Int base = tile.coords[chosen[r]] * h.tile_size;
      v[r] = static_cast<double>((corner >> r & 1) ? base + h.tile_size - 1
                                                   : base);
    }
    for (std::size_t d = 0; d < n; ++d) {
      double x = 0;
      for (std::size_t r = 0; r < n; ++r)
        x += inv[d][r] * v[r];
      lo[d] = std::min(lo[d], x);
      hi[d] = std::max(hi[d], x);
    }
  }
  DomainBox box;
  for (std::size_t d = 0; d < n; ++d) {
    box.lower.push_back(static_cast<Int>(std::floor(lo[d])) - 1);
    box.upper.push_back(static_cast<Int>(std::ceil(hi[d])) + 1);
  }
  return box;
}

/// Calls `fn` on every integer point of `box` in lexicographic order.
inline void for_each_box_point(const DomainBox &box,
                               const std::function<void(const IntVec &)> &fn) {
  const std::size_t n = box.lower.size();
  if (n == 0)
    return;
  for (std::size_t d = 0; d < n; ++d)
    if (box.lower[d] > box.upper[d])
      return;
  IntVec x = box.lower;
  while (true) {
    fn(x);
    std::size_t d = n;
    while (d > 0) {
      --d;
      if (x[d] < box.upper[d]) {
        ++x[d];
        break;
      }
      x[d] = box.lower[d];
      if (d == 0)
        return;
    }
  }
}

inline std::size_t box_volume(const DomainBox &box) {
  std::size_t v = 1;
  for (std::size_t d = 0; d < box.lower.size(); ++d) {
    if (box.upper[d] < box.lower[d])
      return 0;
    v *= static_cast<std::size_t>(box.upper[d] - box.lower[d] + 1);
  }
  return v;
}

/// Lattice points of one tile (ignoring any domain), lexicographic order.
inline std::vector<IntVec> tile_lattice_points(const ProblemSpec &spec,
                                               const TileCoord &tile) {
  const auto box = tile_bounding_box(spec, tile);
  if (!box)
    throw Error(ErrorCode::UnboundedTile,
                "tiling hyperplanes do not span the iteration space");
  std::vector<IntVec> pts;
  for_each_box_point(*box, [&](const IntVec &x) {
    if (tile_coord(x, spec) == tile)
      pts.push_back(x);
  });
  return pts;
}

inline bool tile_fully_inside(const ProblemSpec &spec, const TileCoord &tile,
                              const DomainBox &box) {
  if (!tile_bounding_box(spec, tile))
    return false;
  const auto pts = tile_lattice_points(spec, tile);
  return !pts.empty() && std::all_of(pts.begin(), pts.end(), [&](const IntVec &x) {
    return box.contains(x);
  });
}

} // namespace mars
