#pragma once

/// Input model for uniform-dependence tiled loop nests: iteration space,
/// dependence vectors, tiling hyperplane families and the small value types
/// used to name tiles and their neighbours.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mars {

using Int = std::int64_t;
using IntVec = std::vector<Int>;

enum class ErrorCode {
  Malformed,
  IllegalTiling,
  LongDependence,
  EmptyDomain,
  EmptyTile,
  UnboundedTile,
  BoxTooLarge,
  SetTooComplex,
  UnsupportedSet,
  CandidateExplosion,
  OracleMismatch,
  DimensionUnsupported,
  ParseError,
  FileNotFound,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::Malformed: return "Malformed";
  case ErrorCode::IllegalTiling: return "IllegalTiling";
  case ErrorCode::LongDependence: return "LongDependence";
  case ErrorCode::EmptyDomain: return "EmptyDomain";
  case ErrorCode::EmptyTile: return "EmptyTile";
  case ErrorCode::UnboundedTile: return "UnboundedTile";
  case ErrorCode::BoxTooLarge: return "BoxTooLarge";
  case ErrorCode::SetTooComplex: return "SetTooComplex";
  case ErrorCode::UnsupportedSet: return "UnsupportedSet";
  case ErrorCode::CandidateExplosion: return "CandidateExplosion";
  case ErrorCode::OracleMismatch: return "OracleMismatch";
  case ErrorCode::DimensionUnsupported: return "DimensionUnsupported";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::FileNotFound: return "FileNotFound";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code), message_(message) {}
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// The text without the error-code prefix.
  [[nodiscard]] const std::string &message() const noexcept { return message_; }

private:
  ErrorCode code_;
  std::string message_;
};

inline Int dot(std::span<const Int> a, std::span<const Int> b) {
  Int r = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    r += a[i] * b[i];
  return r;
}

/// Floor division and the matching non-negative remainder.
inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}
inline Int floor_mod(Int a, Int b) { return a - floor_div(a, b) * b; }

inline bool is_zero(std::span<const Int> v) {
  return std::all_of(v.begin(), v.end(), [](Int x) { return x == 0; });
}

inline IntVec add(std::span<const Int> a, std::span<const Int> b) {
  IntVec r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] += b[i];
  return r;
}

inline IntVec sub(std::span<const Int> a, std::span<const Int> b) {
  IntVec r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] -= b[i];
  return r;
}

/// One family of parallel tiling hyperplanes `normal . x = k * tile_size`.
struct Hyperplane {
  IntVec normal;
  Int tile_size = 1;

  friend bool operator==(const Hyperplane &, const Hyperplane &) = default;
};

/// Inclusive integer box.
struct DomainBox {
  IntVec lower;
  IntVec upper;

  [[nodiscard]] bool contains(std::span<const Int> x) const {
    for (std::size_t d = 0; d < x.size(); ++d)
      if (x[d] < lower[d] || x[d] > upper[d])
        return false;
    return true;
  }
  friend bool operator==(const DomainBox &, const DomainBox &) = default;
};

struct ProblemSpec {
  std::string name;
  std::size_t dim = 0;
  std::vector<IntVec> dependences;
  std::vector<Hyperplane> hyperplanes;
  /// Empty means the infinite iteration space Z^dim.
  std::optional<DomainBox> domain;
  /// Display names of the loop iterators; defaults are derived from `dim`.
  std::vector<std::string> iterators;

  [[nodiscard]] std::size_t num_hyperplanes() const {
    return hyperplanes.size();
  }
  [[nodiscard]] bool in_domain(std::span<const Int> x) const {
    return !domain || domain->contains(x);
  }
  /// `normal_k . b_j`, the number of slabs of family k a dependence advances
  /// by at most one step.
  [[nodiscard]] Int crossing_width(std::size_t k, std::size_t j) const {
    return dot(hyperplanes[k].normal, dependences[j]);
  }

  friend bool operator==(const ProblemSpec &, const ProblemSpec &) = default;
};

inline std::vector<std::string> default_iterators(std::size_t dim) {
  if (dim == 1)
    return {"i"};
  if (dim == 2)
    return {"i", "j"};
  if (dim == 3)
    return {"i", "j", "k"};
  std::vector<std::string> names;
  for (std::size_t d = 0; d < dim; ++d)
    names.push_back("x" + std::to_string(d));
  return names;
}

inline std::vector<std::string> iterator_names(const ProblemSpec &spec) {
  return spec.iterators.size() == spec.dim ? spec.iterators
                                           : default_iterators(spec.dim);
}

/// Same spec with every hyperplane's tile size replaced.
inline ProblemSpec with_tile_sizes(ProblemSpec spec,
                                   std::span<const Int> sizes) {
  if (sizes.size() == 1) {
    for (auto &h : spec.hyperplanes)
      h.tile_size = sizes[0];
    return spec;
  }
  if (sizes.size() != spec.hyperplanes.size())
    throw Error(ErrorCode::Malformed,
                "expected 1 or " + std::to_string(spec.hyperplanes.size()) +
                    " tile sizes, got " + std::to_string(sizes.size()));
  for (std::size_t k = 0; k < sizes.size(); ++k)
    spec.hyperplanes[k].tile_size = sizes[k];
  return spec;
}

inline IntVec tile_sizes(const ProblemSpec &spec) {
  IntVec sizes;
  for (const auto &h : spec.hyperplanes)
    sizes.push_back(h.tile_size);
  return sizes;
}

/// Integer tile coordinates, one per hyperplane family.
struct TileCoord {
  IntVec coords;
  friend auto operator<=>(const TileCoord &, const TileCoord &) = default;
};

/// Which hyperplane families are crossed forward to reach a neighbour tile.
struct NeighborOffset {
  std::vector<std::uint8_t> offsets;

  [[nodiscard]] bool is_zero() const {
    return std::all_of(offsets.begin(), offsets.end(),
                       [](std::uint8_t o) { return o == 0; });
  }
  [[nodiscard]] std::string to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      if (k)
        s += ",";
      s += std::to_string(int(offsets[k]));
    }
    return s + ")";
  }
  friend auto operator<=>(const NeighborOffset &,
                          const NeighborOffset &) = default;
};

/// Set of consumer (or producer) tiles of a point. Kept sorted and unique.
class ConsumerSignature {
public:
  ConsumerSignature() = default;
  explicit ConsumerSignature(std::vector<NeighborOffset> tiles)
      : tiles_(std::move(tiles)) {
    std::sort(tiles_.begin(), tiles_.end());
    tiles_.erase(std::unique(tiles_.begin(), tiles_.end()), tiles_.end());
  }

  void insert(const NeighborOffset &o) {
    auto it = std::lower_bound(tiles_.begin(), tiles_.end(), o);
    if (it == tiles_.end() || *it != o)
      tiles_.insert(it, o);
  }
  [[nodiscard]] bool contains(const NeighborOffset &o) const {
    return std::binary_search(tiles_.begin(), tiles_.end(), o);
  }
  [[nodiscard]] const std::vector<NeighborOffset> &tiles() const {
    return tiles_;
  }
  [[nodiscard]] bool empty() const { return tiles_.empty(); }
  [[nodiscard]] std::size_t size() const { return tiles_.size(); }

  [[nodiscard]] std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < tiles_.size(); ++i) {
      if (i)
        s += ",";
      s += tiles_[i].to_string();
    }
    return s + "}";
  }

  friend auto operator<=>(const ConsumerSignature &,
                          const ConsumerSignature &) = default;

private:
  std::vector<NeighborOffset> tiles_;
};

/// All nonempty subsets of `items`, ordered by size then lexicographically by
/// position.
template <typename T>
std::vector<std::vector<T>> nontrivial_parts(const std::vector<T> &items) {
  const std::size_t n = items.size();
  if (n >= 8 * sizeof(std::size_t) - 1)
    throw Error(ErrorCode::CandidateExplosion,
                "too many items for subset enumeration");
  std::vector<std::size_t> masks;
  for (std::size_t m = 1; m < (std::size_t{1} << n); ++m)
    masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(), [](std::size_t a, std::size_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  std::vector<std::vector<T>> parts;
  parts.reserve(masks.size());
  for (std::size_t m : masks) {
    std::vector<T> part;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1)
        part.push_back(items[i]);
    parts.push_back(std::move(part));
  }
  return parts;
}

/// Every nonzero 0/1 offset vector of length `num_families`: the possible
/// consumer tiles of a tile.
inline std::vector<NeighborOffset> all_neighbor_offsets(std::size_t num_families) {
  std::vector<NeighborOffset> out;
  for (std::size_t m = 1; m < (std::size_t{1} << num_families); ++m) {
    NeighborOffset o;
    for (std::size_t k = 0; k < num_families; ++k)
      o.offsets.push_back(static_cast<std::uint8_t>(m >> k & 1));
    out.push_back(std::move(o));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct ValidationResult {
  bool ok = true;
  std::optional<ErrorCode> error;
  std::string message;

  explicit operator bool() const { return ok; }
};

/// Bounding box of the tile `coords` (a superset, exact membership must be
/// checked with tile coordinates). Empty when the normals do not span the
/// space.
inline std::optional<DomainBox> tile_bounding_box(const ProblemSpec &spec,
                                                  const TileCoord &tile);
inline bool tile_fully_inside(const ProblemSpec &spec, const TileCoord &tile,
                       const DomainBox &box);

namespace detail {

inline ValidationResult fail(ErrorCode code, std::string msg) {
  return {false, code, std::move(msg)};
}

inline std::string vec_str(std::span<const Int> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

inline ValidationResult check_structure(const ProblemSpec &spec) {
  const std::size_t n = spec.dim;
  if (n == 0)
    return fail(ErrorCode::Malformed, "dim must be at least 1");
  if (spec.dependences.empty())
    return fail(ErrorCode::Malformed, "at least one dependence is required");
  if (spec.hyperplanes.empty())
    return fail(ErrorCode::Malformed, "at least one hyperplane is required");
  for (const auto &b : spec.dependences) {
    if (b.size() != n)
      return fail(ErrorCode::Malformed,
                  "dependence " + vec_str(b) + " has wrong length");
    if (is_zero(b))
      return fail(ErrorCode::Malformed, "zero dependence vector");
  }
  for (const auto &h : spec.hyperplanes) {
    if (h.normal.size() != n)
      return fail(ErrorCode::Malformed,
                  "normal " + vec_str(h.normal) + " has wrong length");
    if (is_zero(h.normal))
      return fail(ErrorCode::Malformed, "zero normal vector");
    if (h.tile_size < 1)
      return fail(ErrorCode::Malformed, "tile size must be at least 1");
  }
  if (spec.domain) {
    const auto &d = *spec.domain;
    if (d.lower.size() != n || d.upper.size() != n)
      return fail(ErrorCode::Malformed, "domain bounds have wrong length");
    for (std::size_t i = 0; i < n; ++i)
      if (d.lower[i] > d.upper[i])
        return fail(ErrorCode::EmptyDomain, "domain lower > upper");
  }
  return {};
}

} // namespace detail

/// Checks structure, tiling legality (every dependence crosses each family
/// forward or not at all) and that no dependence jumps over a whole slab.
inline ValidationResult validate(const ProblemSpec &spec) {
  if (auto r = detail::check_structure(spec); !r)
    return r;
  for (std::size_t k = 0; k < spec.hyperplanes.size(); ++k) {
    const auto &h = spec.hyperplanes[k];
    for (std::size_t j = 0; j < spec.dependences.size(); ++j) {
      const Int m = spec.crossing_width(k, j);
      if (m < 0)
        return detail::fail(ErrorCode::IllegalTiling,
                            "dependence " + detail::vec_str(spec.dependences[j]) +
                                " crosses hyperplane " +
                                detail::vec_str(h.normal) +
                                " backwards (m = " + std::to_string(m) + ")");
      if (m > h.tile_size)
        return detail::fail(ErrorCode::LongDependence,
                            "dependence " + detail::vec_str(spec.dependences[j]) +
                                " spans " + std::to_string(m) +
                                " > tile size " + std::to_string(h.tile_size) +
                                " along " + detail::vec_str(h.normal));
    }
  }
  if (spec.domain) {
    // Look for one tile entirely inside the box, scanning tile coordinates
    // reachable from the box corners.
    const auto &box = *spec.domain;
    const std::size_t t = spec.hyperplanes.size();
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
    TileCoord tile{lo};
    bool found = false;
    std::size_t visited = 0;
    while (!found) {
      if (++visited > 1'000'000)
        break;
      if (tile_fully_inside(spec, tile, box))
        found = true;
      std::size_t k = 0;
      for (; k < t; ++k) {
        if (tile.coords[k] < hi[k]) {
          ++tile.coords[k];
          break;
        }
        tile.coords[k] = lo[k];
      }
      if (k == t)
        break;
    }
    if (!found)
      return detail::fail(ErrorCode::EmptyDomain,
                          "domain box contains no full tile");
  }
  return {};
}

inline void require_valid(const ProblemSpec &spec) {
  if (auto r = validate(spec); !r)
    throw Error(*r.error, r.message);
}

} // namespace mars

#include "mars/detail/tile_geometry.hpp"
