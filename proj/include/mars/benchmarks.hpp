#pragma once

/// Bundled uniform-dependence benchmark configurations.

#include "mars/core_model.hpp"

namespace mars::benchmarks {

/// Expected (consumer tiles, MARS in the sample tile, singletons).
struct ReferenceCounts {
  std::size_t consumer_tiles;
  std::size_t mars;
  std::size_t singletons;
  /// Nonempty domain-wide MARS when different from `mars`.
  std::size_t mars_raw;
};

struct Benchmark {
  ProblemSpec spec;
  ReferenceCounts expected;
  /// Part of the seven-row reference table.
  bool in_table = true;
};

namespace detail {

inline ProblemSpec make(std::string name, std::vector<std::string> iterators,
                        std::vector<IntVec> deps, std::vector<IntVec> normals,
                        Int size) {
  ProblemSpec spec;
  spec.name = std::move(name);
  spec.dim = deps.front().size();
  spec.dependences = std::move(deps);
  for (auto &n : normals)
    spec.hyperplanes.push_back({std::move(n), size});
  spec.iterators = std::move(iterators);
  return spec;
}

} // namespace detail

/// Default tile size: 4 in two dimensions, 8 in three.
inline Int default_tile_size(std::size_t dim) { return dim <= 2 ? 4 : 8; }

inline Benchmark sw() {
  return {detail::make("sw", {"i", "j"}, {{1, 0}, {0, 1}, {1, 1}},
                       {{1, 1}, {0, 1}}, 4),
          {3, 4, 2, 4}};
}

/// Smith-Waterman with square tiles, the hand-worked configuration.
inline Benchmark sw_square() {
  return {detail::make("sw-square", {"i", "j"}, {{1, 0}, {0, 1}, {1, 1}},
                       {{1, 0}, {0, 1}}, 4),
          {3, 3, 1, 3},
          false};
}

inline Benchmark jacobi_1d() {
  return {detail::make("jacobi-1d", {"t", "i"}, {{1, -1}, {1, 0}, {1, 1}},
                       {{1, 1}, {1, -1}}, 4),
          {3, 4, 2, 4}};
}

inline Benchmark canonical_3d() {
  return {detail::make("canonical-3d", {"i", "j", "k"},
                       {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                       {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 8),
          {3, 7, 1, 7}};
}

inline Benchmark gemm() {
  return {detail::make("gemm", {"i", "j", "k"}, {{0, 1, 0}},
                       {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 8),
          {1, 1, 0, 1}};
}

inline Benchmark seidel_2d() {
  return {detail::make("seidel-2d", {"t", "i", "j"},
                       {{0, 1, 1},
                        {0, 0, 1},
                        {1, -1, 1},
                        {0, 1, 0},
                        {1, 0, 0},
                        {1, -1, 0},
                        {0, 1, -1},
                        {1, 0, -1},
                        {1, -1, -1}},
                       {{1, 0, 0}, {1, 1, 0}, {4, 2, 1}}, 8),
          {7, 13, 2, 13}};
}

inline Benchmark jacobi_2d_r() {
  return {detail::make("jacobi-2d-r", {"t", "i", "j"},
                       {{1, 0, 1}, {1, 1, 0}, {1, 0, 0}, {1, -1, 0}, {1, 0, -1}},
                       {{1, 0, 0}, {1, 1, 0}, {1, 0, 1}}, 8),
          {7, 13, 4, 13}};
}

inline Benchmark jacobi_2d_d() {
  return {detail::make("jacobi-2d-d", {"t", "i", "j"},
                       {{1, 0, 1}, {1, 1, 0}, {1, 0, 0}, {1, -1, 0}, {1, 0, -1}},
                       {{1, 1, 0}, {1, 0, 1}, {1, -1, 0}, {1, 0, -1}}, 8),
          {15, 26, 6, 34}};
}

/// The seven reference rows in table order, followed by the square-tiled
/// Smith-Waterman example.
inline std::vector<Benchmark> all() {
  return {sw(),          jacobi_1d(),   canonical_3d(), gemm(),
          seidel_2d(),   jacobi_2d_r(), jacobi_2d_d(),  sw_square()};
}

} // namespace mars::benchmarks
