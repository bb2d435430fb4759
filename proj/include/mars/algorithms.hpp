#pragma once

/// Flow-out / flow-in sets from per-dependence crossing contributions, and
/// the partition of the flow-out into maximal atomic irredundant sets (MARS):
/// blocks of points sharing exactly the same set of consumer tiles.

#include "mars/qset.hpp"

#include <map>
#include <set>
#include <utility>

namespace mars {

enum class Direction {
  /// `x + b` leaves x's tile: x is produced here and consumed elsewhere.
  Forward,
  /// `x - b` lies in another tile: x reads a value produced elsewhere.
  Backward,
};

struct FlowResult {
  QSet whole;
  /// Keyed by (hyperplane index, dependence index).
  std::map<std::pair<std::size_t, std::size_t>, QSet> per_dependence;
};

struct Mars {
  ConsumerSignature signature;
  /// Domain-wide set; intersect with a tile to get that tile's block.
  QSet set;
};

struct PartitionOptions {
  /// Candidate signatures range over all 2^T - 1 neighbours instead of the
  /// realizable ones only.
  bool exhaustive = false;
  std::size_t candidate_budget = std::size_t{1} << 20;
  QSetLimits limits{};
};

struct PartitionResult {
  std::vector<Mars> mars;
  /// Neighbour tiles the candidate signatures were drawn from.
  std::vector<NeighborOffset> candidate_tiles;
  /// 2^|candidate_tiles| - 1.
  std::size_t candidates_total = 0;
  /// Candidates for which the exclusion part had to be computed.
  std::size_t candidates_evaluated = 0;
};

// ---------------------------------------------------------------------------
// Building blocks.

/// The residue range of `normal_k . x mod s_k` for which stepping by a
/// dependence with width `m` crosses family k. Forward crossings sit at the top
/// of the slab, backward ones at the bottom.
inline ResidueInterval crossing_atom(const Hyperplane &h, Int m, Direction dir) {
  if (dir == Direction::Forward)
    return ResidueInterval::from_negative_range(h.normal, h.tile_size, -m, -1);
  return ResidueInterval{h.normal, h.tile_size, 0, m - 1};
}

inline ResidueInterval non_crossing_atom(const Hyperplane &h, Int m,
                                         Direction dir) {
  if (dir == Direction::Forward)
    return ResidueInterval{h.normal, h.tile_size, 0, h.tile_size - m - 1};
  return ResidueInterval{h.normal, h.tile_size, m, h.tile_size - 1};
}

/// Affine constraints of the domain box (universe for infinite domains).
inline Conjunct domain_conjunct(const ProblemSpec &spec, std::span<const Int> shift = {}) {
  Conjunct c;
  if (!spec.domain)
    return c;
  for (std::size_t d = 0; d < spec.dim; ++d) {
    const Int t = shift.empty() ? 0 : shift[d];
    IntVec e(spec.dim, 0);
    e[d] = 1;
    c.add_affine({e, t - spec.domain->lower[d]});
    e[d] = -1;
    c.add_affine({e, spec.domain->upper[d] - t});
  }
  return c;
}

/// `x in D` and the dependence target `x +/- b in D`.
inline Conjunct active_conjunct(const ProblemSpec &spec, std::size_t j,
                                Direction dir) {
  IntVec shift = spec.dependences[j];
  if (dir == Direction::Backward)
    for (auto &v : shift)
      v = -v;
  return domain_conjunct(spec) & domain_conjunct(spec, shift);
}

/// Constraints of one tile: `t_k s_k <= c_k . x <= t_k s_k + s_k - 1`.
inline QSet tile_set(const ProblemSpec &spec, const TileCoord &tile) {
  Conjunct c;
  for (std::size_t k = 0; k < spec.hyperplanes.size(); ++k) {
    const auto &h = spec.hyperplanes[k];
    IntVec neg = h.normal;
    for (auto &v : neg)
      v = -v;
    const Int base = tile.coords[k] * h.tile_size;
    c.add_affine({h.normal, -base});
    c.add_affine({neg, base + h.tile_size - 1});
  }
  return QSet(spec.dim, {c});
}

/// Points of dependence `j`'s source (or target, for Backward) whose step
/// crosses family `k`, restricted to the domain.
inline QSet crossing_set(std::size_t k, std::size_t j, const ProblemSpec &spec,
                         Direction dir = Direction::Forward) {
  const Int m = spec.crossing_width(k, j);
  if (m <= 0)
    return QSet::empty(spec.dim);
  Conjunct c = active_conjunct(spec, j, dir);
  c.add_residue(crossing_atom(spec.hyperplanes[k], m, dir));
  return QSet(spec.dim, {c});
}

inline FlowResult flow(const ProblemSpec &spec, Direction dir,
                       const QSetLimits &limits = {}) {
  require_valid(spec);
  FlowResult r{QSet::empty(spec.dim), {}};
  for (std::size_t k = 0; k < spec.hyperplanes.size(); ++k)
    for (std::size_t j = 0; j < spec.dependences.size(); ++j) {
      QSet f = crossing_set(k, j, spec, dir);
      r.whole = unite(r.whole, f, limits);
      r.per_dependence.emplace(std::pair{k, j}, std::move(f));
    }
  r.whole = simplify(r.whole);
  return r;
}

/// Domain-wide flow-out: every point with a consumer in another tile.
inline FlowResult flow_out(const ProblemSpec &spec, const QSetLimits &limits = {}) {
  return flow(spec, Direction::Forward, limits);
}

/// Domain-wide flow-in, computed from the reversed dependences: every point
/// that reads a value produced in another tile. The producers themselves are
/// `x - b_j` for x in `per_dependence[(k, j)]`.
inline FlowResult flow_in(const ProblemSpec &spec, const QSetLimits &limits = {}) {
  return flow(spec, Direction::Backward, limits);
}

/// Points from which dependence `j` crosses exactly the families set in
/// `tile` and no other, with the target inside the domain.
inline QSet exact_crossing_set(const ProblemSpec &spec, std::size_t j,
                               const NeighborOffset &tile,
                               Direction dir = Direction::Forward) {
  Conjunct c = active_conjunct(spec, j, dir);
  for (std::size_t k = 0; k < spec.hyperplanes.size(); ++k) {
    const Int m = spec.crossing_width(k, j);
    if (tile.offsets[k]) {
      if (m <= 0)
        return QSet::empty(spec.dim);
      c.add_residue(crossing_atom(spec.hyperplanes[k], m, dir));
    } else if (m > 0) {
      c.add_residue(non_crossing_atom(spec.hyperplanes[k], m, dir));
    }
    if (c.infeasible())
      return QSet::empty(spec.dim);
  }
  return QSet(spec.dim, {c});
}

/// Sample points on which all sets built from this spec are decided exactly:
/// the period box of the tiling forms, or the domain box when bounded.
inline std::vector<IntVec> decision_points(const ProblemSpec &spec,
                                           const QSetLimits &limits = {}) {
  DomainBox box;
  if (spec.domain) {
    box = *spec.domain;
  } else {
    QSet forms(spec.dim);
    for (const auto &h : spec.hyperplanes)
      forms.push(Conjunct::of(ResidueInterval{h.normal, h.tile_size, 0, 0}));
    box = period_box(forms);
  }
  if (box_volume(box) > limits.point_budget)
    throw Error(ErrorCode::BoxTooLarge,
                "decision box has " + std::to_string(box_volume(box)) +
                    " points");
  std::vector<IntVec> pts;
  pts.reserve(box_volume(box));
  for_each_box_point(box, [&](const IntVec &x) { pts.push_back(x); });
  return pts;
}

/// Neighbour tiles that some dependence actually reaches from some point.
inline std::vector<NeighborOffset> realizable_consumers(const ProblemSpec &spec,
                                                        EmptinessCache &cache) {
  std::vector<NeighborOffset> out;
  for (const auto &tile : all_neighbor_offsets(spec.hyperplanes.size()))
    for (std::size_t j = 0; j < spec.dependences.size(); ++j)
      if (!cache.empty(exact_crossing_set(spec, j, tile))) {
        out.push_back(tile);
        break;
      }
  return out;
}

inline std::vector<NeighborOffset> realizable_consumers(const ProblemSpec &spec,
                                                        const QSetLimits &limits = {}) {
  require_valid(spec);
  EmptinessCache cache(decision_points(spec, limits));
  return realizable_consumers(spec, cache);
}

namespace detail {

class Partitioner {
public:
  Partitioner(const ProblemSpec &spec, const PartitionOptions &opts)
      : spec_(spec), opts_(opts), cache_(decision_points(spec, opts.limits)),
        all_tiles_(all_neighbor_offsets(spec.hyperplanes.size())) {}

  PartitionResult run() {
    PartitionResult result;
    result.candidate_tiles =
        opts_.exhaustive ? all_tiles_ : realizable_consumers(spec_, cache_);
    const std::size_t u = result.candidate_tiles.size();
    if (u >= 63 || (std::size_t{1} << u) - 1 > opts_.candidate_budget)
      throw Error(ErrorCode::CandidateExplosion,
                  std::to_string(u) + " candidate tiles give more than " +
                      std::to_string(opts_.candidate_budget) + " signatures");
    result.candidates_total = (std::size_t{1} << u) - 1;
    prepare(result.candidate_tiles);

    std::vector<std::size_t> chosen;
    const QSet domain(spec_.dim, {domain_conjunct(spec_)});
    search(result, 0, chosen, domain);
    std::sort(result.mars.begin(), result.mars.end(),
              [](const Mars &a, const Mars &b) { return a.signature < b.signature; });
    return result;
  }

private:
  /// Precomputes, for every candidate tile T, A_T = U_b P_{T,b}, and for
  /// every neighbour tile T and dependence b, Q_{T,b} = D \ P_{T,b}.
  void prepare(const std::vector<NeighborOffset> &candidates) {
    reach_.clear();
    for (const auto &tile : candidates) {
      QSet reach = QSet::empty(spec_.dim);
      for (std::size_t j = 0; j < spec_.dependences.size(); ++j)
        reach = unite(reach, cache_.prune(exact_crossing_set(spec_, j, tile)),
                      opts_.limits);
      reach.drop_subsumed();
      reach_.push_back(std::move(reach));
    }
    exclusion_.assign(all_tiles_.size(), {});
    const QSet domain(spec_.dim, {domain_conjunct(spec_)});
    for (std::size_t t = 0; t < all_tiles_.size(); ++t)
      for (std::size_t j = 0; j < spec_.dependences.size(); ++j) {
        const QSet p = exact_crossing_set(spec_, j, all_tiles_[t]);
        // b never reaches T: Q_{T,b} is the whole domain and can be skipped.
        if (cache_.empty(p))
          continue;
        exclusion_[t].push_back(
            cache_.prune(intersect(domain, complement(p, opts_.limits), opts_.limits)));
      }
  }

  QSet narrow(const QSet &a, const QSet &b) {
    QSet r = cache_.prune(intersect(a, b, opts_.limits));
    if (r.disjuncts().size() > 1)
      r.drop_subsumed();
    return r;
  }

  /// Depth-first over subsets of the candidate tiles in increasing index
  /// order. `reach` is the intersection of A_T over the chosen tiles; once it
  /// is empty every superset is empty too.
  void search(PartitionResult &result, std::size_t start,
              std::vector<std::size_t> &chosen, const QSet &reach) {
    for (std::size_t idx = start; idx < result.candidate_tiles.size(); ++idx) {
      QSet a = narrow(reach, reach_[idx]);
      if (a.trivially_empty())
        continue;
      chosen.push_back(idx);
      ++result.candidates_evaluated;
      QSet m = exclude(result.candidate_tiles, chosen, a);
      if (!m.trivially_empty()) {
        std::vector<NeighborOffset> sig;
        for (std::size_t c : chosen)
          sig.push_back(result.candidate_tiles[c]);
        result.mars.push_back({ConsumerSignature(std::move(sig)), simplify(m)});
      }
      search(result, idx + 1, chosen, a);
      chosen.pop_back();
    }
  }

  /// A intersected with Q_{T,b} for every neighbour tile T outside the chosen
  /// signature and every dependence b.
  QSet exclude(const std::vector<NeighborOffset> &candidates,
               const std::vector<std::size_t> &chosen, QSet a) {
    std::vector<const NeighborOffset *> in;
    for (std::size_t c : chosen)
      in.push_back(&candidates[c]);
    for (std::size_t t = 0; t < all_tiles_.size() && !a.trivially_empty(); ++t) {
      const bool included = std::any_of(in.begin(), in.end(), [&](const NeighborOffset *o) {
        return *o == all_tiles_[t];
      });
      if (included)
        continue;
      for (const auto &q : exclusion_[t]) {
        a = narrow(a, q);
        if (a.trivially_empty())
          break;
      }
    }
    return a;
  }

  const ProblemSpec &spec_;
  PartitionOptions opts_;
  EmptinessCache cache_;
  std::vector<NeighborOffset> all_tiles_;
  std::vector<QSet> reach_;
  std::vector<std::vector<QSet>> exclusion_;
};

} // namespace detail

/// Domain-wide MARS, sorted by signature. Only nonempty sets are returned.
inline PartitionResult mars_partition(const ProblemSpec &spec,
                                      const PartitionOptions &opts = {}) {
  require_valid(spec);
  return detail::Partitioner(spec, opts).run();
}

/// Upper bound on the number of MARS for T hyperplane families.
inline std::size_t mars_upper_bound(std::size_t num_families) {
  const std::size_t tiles = (std::size_t{1} << num_families) - 1;
  if (tiles >= 63)
    return static_cast<std::size_t>(-1);
  return (std::size_t{1} << tiles) - 1;
}

/// Points of one tile (inside the domain) that belong to `set`.
inline std::vector<IntVec> points_in_tile(const QSet &set, const ProblemSpec &spec,
                                          const TileCoord &tile) {
  std::vector<IntVec> out;
  for (auto &x : tile_lattice_points(spec, tile))
    if (spec.in_domain(x) && set.member(x))
      out.push_back(std::move(x));
  return out;
}

/// Producer points read by `tile`, recovered from a backward flow result:
/// `x - b_j` for every reader x of the tile in `per_dependence[(k, j)]`.
inline std::set<IntVec> flow_in_producers(const ProblemSpec &spec,
                                          const FlowResult &in,
                                          const TileCoord &tile) {
  std::set<IntVec> out;
  const auto pts = tile_lattice_points(spec, tile);
  for (const auto &[key, set] : in.per_dependence)
    for (const auto &x : pts)
      if (spec.in_domain(x) && set.member(x))
        out.insert(sub(x, spec.dependences[key.second]));
  return out;
}

} // namespace mars
