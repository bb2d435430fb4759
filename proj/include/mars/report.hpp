#pragma once

/// Per-configuration statistics: consumer tiles, MARS counts, singletons,
/// block geometry, and the redundancy a per-consumer transfer scheme would
/// incur. Every symbolic result is cross-checked against the oracle.

#include "mars/algorithms.hpp"
#include "mars/oracle.hpp"

#include <json.hpp>

#include <iomanip>
#include <numeric>
#include <sstream>

namespace mars {

struct MarsStats {
  ConsumerSignature signature;
  std::size_t points_per_tile = 0;
  /// Dimension of the affine hull of the block inside the sample tile.
  std::size_t dimensionality = 0;
  bool is_singleton = false;
  std::string closed_form;
};

struct ConfigReport {
  std::string name;
  std::size_t dim = 0;
  std::vector<IntVec> dependences;
  std::vector<Hyperplane> hyperplanes;
  std::vector<std::string> iterators;
  IntVec tile_sizes;
  TileCoord sample_tile;
  bool exhaustive = false;

  std::size_t consumer_tiles = 0;
  /// Nonempty MARS over the whole domain.
  std::size_t mars_raw = 0;
  /// MARS with at least one point in the sample tile.
  std::size_t mars_nonempty = 0;
  std::size_t singletons = 0;
  std::vector<MarsStats> mars;
  /// Domain-wide MARS with no point in the sample tile.
  std::vector<MarsStats> absent_from_tile;

  std::size_t flow_out_volume_per_tile = 0;
  std::size_t naive_overlap_volume = 0;
  std::size_t candidates_total = 0;
  std::size_t candidates_evaluated = 0;
};

struct AnalyzeOptions {
  PartitionOptions partition{};
  /// Overrides the default sample tile.
  std::optional<TileCoord> tile;
};

/// Rank of the vectors `p - p0` over the rationals.
inline std::size_t affine_rank(const std::vector<IntVec> &points) {
  if (points.size() < 2)
    return 0;
  std::vector<IntVec> rows;
  for (std::size_t i = 1; i < points.size(); ++i)
    rows.push_back(sub(points[i], points[0]));
  const std::size_t n = points[0].size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0)
      ++piv;
    if (piv == rows.size())
      continue;
    std::swap(rows[rank], rows[piv]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][col] == 0)
        continue;
      const Int a = rows[rank][col], b = rows[r][col];
      Int g = 0;
      for (std::size_t d = 0; d < n; ++d) {
        rows[r][d] = rows[r][d] * a - rows[rank][d] * b;
        g = std::gcd(g, rows[r][d]);
      }
      if (g > 1)
        for (auto &v : rows[r])
          v /= g;
    }
    ++rank;
  }
  return rank;
}

namespace detail {

inline std::string describe(const oracle::PointSet &pts) {
  std::string s;
  std::size_t shown = 0;
  for (const auto &p : pts) {
    if (shown++ == 4) {
      s += " ...";
      break;
    }
    s += " " + vec_str(p);
  }
  return s;
}

/// Throws OracleMismatch unless `symbolic` equals the oracle partition.
inline void cross_check(const oracle::Partition &symbolic,
                        const oracle::Partition &truth) {
  for (const auto &[sig, pts] : truth) {
    auto it = symbolic.find(sig);
    if (it == symbolic.end())
      throw Error(ErrorCode::OracleMismatch,
                  "signature " + sig.to_string() + " missing from symbolic result" +
                      describe(pts));
    if (it->second != pts)
      throw Error(ErrorCode::OracleMismatch,
                  "block " + sig.to_string() + " has " +
                      std::to_string(it->second.size()) + " points, oracle has " +
                      std::to_string(pts.size()));
  }
  for (const auto &[sig, pts] : symbolic)
    if (!truth.contains(sig))
      throw Error(ErrorCode::OracleMismatch,
                  "extra symbolic block " + sig.to_string() + describe(pts));
}

} // namespace detail

/// Symbolic MARS restricted to one tile, keyed by signature; empty blocks are
/// left out.
inline oracle::Partition restrict_to_tile(const PartitionResult &partition,
                                          const ProblemSpec &spec,
                                          const TileCoord &tile) {
  oracle::Partition out;
  const auto pts = tile_lattice_points(spec, tile);
  for (const auto &m : partition.mars) {
    oracle::PointSet block;
    for (const auto &x : pts)
      if (spec.in_domain(x) && m.set.member(x))
        block.insert(x);
    if (!block.empty())
      out.emplace(m.signature, std::move(block));
  }
  return out;
}

inline ConfigReport analyze(const ProblemSpec &spec,
                            const AnalyzeOptions &opts = {}) {
  require_valid(spec);
  const PartitionResult partition = mars_partition(spec, opts.partition);
  const TileCoord tile = opts.tile ? *opts.tile : oracle::sample_tile(spec);

  const oracle::Partition symbolic = restrict_to_tile(partition, spec, tile);
  detail::cross_check(symbolic, oracle::mars(spec, tile));

  ConfigReport r;
  r.name = spec.name;
  r.dim = spec.dim;
  r.dependences = spec.dependences;
  r.hyperplanes = spec.hyperplanes;
  r.iterators = iterator_names(spec);
  r.tile_sizes = tile_sizes(spec);
  r.sample_tile = tile;
  r.exhaustive = opts.partition.exhaustive;
  r.candidates_total = partition.candidates_total;
  r.candidates_evaluated = partition.candidates_evaluated;
  {
    EmptinessCache cache(decision_points(spec, opts.partition.limits));
    r.consumer_tiles = realizable_consumers(spec, cache).size();
  }
  r.mars_raw = partition.mars.size();

  const auto names = iterator_names(spec);
  for (const auto &m : partition.mars) {
    MarsStats st;
    st.signature = m.signature;
    st.closed_form = to_string(m.set, names);
    auto it = symbolic.find(m.signature);
    if (it == symbolic.end()) {
      r.absent_from_tile.push_back(std::move(st));
      continue;
    }
    const std::vector<IntVec> pts(it->second.begin(), it->second.end());
    st.points_per_tile = pts.size();
    st.dimensionality = affine_rank(pts);
    st.is_singleton = pts.size() == 1;
    r.flow_out_volume_per_tile += pts.size();
    r.singletons += st.is_singleton ? 1 : 0;
    r.mars.push_back(std::move(st));
  }
  r.mars_nonempty = r.mars.size();

  for (const auto &[consumer, pts] : oracle::reads_by_consumer(spec, tile))
    r.naive_overlap_volume += pts.size();
  return r;
}

/// True iff (consumer tiles, nonempty MARS, singletons) agree across all the
/// given tile-size vectors.
inline bool stability_check(const ProblemSpec &spec,
                            const std::vector<IntVec> &sizes,
                            const AnalyzeOptions &opts = {}) {
  std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> first;
  for (const auto &s : sizes) {
    const ProblemSpec sized = with_tile_sizes(spec, s);
    require_valid(sized);
    const ConfigReport r = analyze(sized, opts);
    const auto key = std::tuple{r.consumer_tiles, r.mars_nonempty, r.singletons};
    if (!first)
      first = key;
    else if (*first != key)
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Output.

inline nlohmann::ordered_json signature_json(const ConsumerSignature &sig) {
  auto j = nlohmann::ordered_json::array();
  for (const auto &o : sig.tiles()) {
    auto row = nlohmann::ordered_json::array();
    for (auto v : o.offsets)
      row.push_back(int(v));
    j.push_back(std::move(row));
  }
  return j;
}

inline nlohmann::ordered_json to_json(const ConfigReport &r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["name"] = r.name;
  j["consumer_tiles"] = r.consumer_tiles;
  j["mars_raw"] = r.mars_raw;
  j["mars_nonempty"] = r.mars_nonempty;
  j["singletons"] = r.singletons;
  auto blocks = ordered_json::array();
  for (const auto &m : r.mars) {
    ordered_json b;
    b["signature"] = signature_json(m.signature);
    b["closed_form"] = m.closed_form;
    b["points_per_tile"] = m.points_per_tile;
    b["dimensionality"] = m.dimensionality;
    blocks.push_back(std::move(b));
  }
  j["mars"] = std::move(blocks);
  auto absent = ordered_json::array();
  for (const auto &m : r.absent_from_tile) {
    ordered_json b;
    b["signature"] = signature_json(m.signature);
    b["closed_form"] = m.closed_form;
    absent.push_back(std::move(b));
  }
  j["mars_absent_from_tile"] = std::move(absent);
  j["dim"] = r.dim;
  j["dependences"] = r.dependences;
  auto hyps = ordered_json::array();
  for (const auto &h : r.hyperplanes)
    hyps.push_back({{"normal", h.normal}, {"tile_size", h.tile_size}});
  j["hyperplanes"] = std::move(hyps);
  j["tile_sizes"] = r.tile_sizes;
  j["sample_tile"] = r.sample_tile.coords;
  j["exhaustive"] = r.exhaustive;
  j["candidates_total"] = r.candidates_total;
  j["candidates_evaluated"] = r.candidates_evaluated;
  j["flow_out_volume_per_tile"] = r.flow_out_volume_per_tile;
  j["naive_overlap_volume"] = r.naive_overlap_volume;
  return j;
}

inline std::string hyperplane_label(const Hyperplane &h,
                                    const std::vector<std::string> &names) {
  return format_linear(h.normal, names);
}

/// Fixed-width table in the column layout of the reference results.
inline std::string format_table(const std::vector<ConfigReport> &reports,
                                const std::vector<std::string> &extra_header = {},
                                const std::vector<std::vector<std::string>> &extra = {}) {
  std::vector<std::string> header = {"Dims", "Application", "Tiling hyperplanes",
                                     "Tile sizes", "# Cons. tiles", "Nb MARS",
                                     "Raw MARS", "Singletons", "Flow-out/tile"};
  header.insert(header.end(), extra_header.begin(), extra_header.end());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto &r = reports[i];
    const auto names =
        r.iterators.size() == r.dim ? r.iterators : default_iterators(r.dim);
    std::string hyps, sizes;
    for (std::size_t k = 0; k < r.hyperplanes.size(); ++k) {
      if (k) {
        hyps += ", ";
        sizes += ",";
      }
      hyps += hyperplane_label(r.hyperplanes[k], names);
      sizes += std::to_string(r.tile_sizes[k]);
    }
    std::vector<std::string> row = {std::to_string(r.dim),
                                    r.name,
                                    hyps,
                                    sizes,
                                    std::to_string(r.consumer_tiles),
                                    std::to_string(r.mars_nonempty),
                                    std::to_string(r.mars_raw),
                                    std::to_string(r.singletons),
                                    std::to_string(r.flow_out_volume_per_tile)};
    if (i < extra.size())
      row.insert(row.end(), extra[i].begin(), extra[i].end());
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  auto display_width = [](const std::string &s) {
    // Count code points, not bytes.
    return static_cast<std::size_t>(std::count_if(
        s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  };
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = display_width(header[c]);
    for (const auto &row : rows)
      if (c < row.size())
        width[c] = std::max(width[c], display_width(row[c]));
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string> &row) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string cell = c < row.size() ? row[c] : "";
      os << cell << std::string(width[c] - display_width(cell), ' ');
      os << (c + 1 == header.size() ? "\n" : "  ");
    }
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width)
    total += w + 2;
  os << std::string(total - 2, '-') << "\n";
  for (const auto &row : rows)
    emit(row);
  return os.str();
}

/// Human-readable listing of one report's MARS.
inline std::string format_mars_listing(const ConfigReport &r) {
  std::ostringstream os;
  os << r.name << ": " << r.mars_nonempty << " MARS in sample tile "
     << detail::vec_str(r.sample_tile.coords) << " (" << r.mars_raw
     << " domain-wide), " << r.consumer_tiles << " consumer tiles, "
     << r.singletons << " singletons\n";
  for (const auto &m : r.mars)
    os << "  " << m.signature.to_string() << "  points/tile=" << m.points_per_tile
       << "  dim=" << m.dimensionality << "  " << m.closed_form << "\n";
  for (const auto &m : r.absent_from_tile)
    os << "  " << m.signature.to_string() << "  (not in sample tile)  "
       << m.closed_form << "\n";
  return os.str();
}

} // namespace mars
