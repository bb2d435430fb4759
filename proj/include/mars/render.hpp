#pragma once

/// Renderers: a 2D SVG of the iteration space coloured by MARS, and a JSON
/// point dump of one 3D tile for external plotting.

#include "mars/algorithms.hpp"
#include "mars/oracle.hpp"
#include "mars/report.hpp"

#include <array>
#include <sstream>

namespace mars {

struct RenderWindow {
  /// First tile drawn and number of tiles per family.
  TileCoord origin;
  Int extent = 3;
};

namespace detail {

inline constexpr std::array<const char *, 16> kPalette = {
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4",
    "#f032e6", "#bfef45", "#469990", "#9a6324", "#800000", "#808000",
    "#000075", "#fabed4", "#ffe119", "#aaffc3"};
inline constexpr const char *kInterior = "#d9d9d9";

inline std::string mars_color(std::size_t index) {
  if (index < kPalette.size())
    return kPalette[index];
  // Deterministic fallback beyond the palette: spread hues.
  const unsigned h = static_cast<unsigned>((index * 137) % 360);
  return "hsl(" + std::to_string(h) + ",65%,50%)";
}

inline std::string xml_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

inline bool in_window(const TileCoord &t, const RenderWindow &w) {
  for (std::size_t k = 0; k < t.coords.size(); ++k)
    if (t.coords[k] < w.origin.coords[k] ||
        t.coords[k] >= w.origin.coords[k] + w.extent)
      return false;
  return true;
}

} // namespace detail

inline RenderWindow default_window(const ProblemSpec &spec) {
  return {oracle::sample_tile(spec), 3};
}

/// Standalone SVG 1.1 document: one unit cell per point whose tile lies in
/// the window, coloured by the MARS containing it (grey for points outside
/// the flow-out), heavy strokes on tile boundaries and a legend.
inline std::string render_svg2d(const ProblemSpec &spec,
                                const PartitionResult &partition,
                                const RenderWindow &window) {
  if (spec.dim != 2)
    throw Error(ErrorCode::DimensionUnsupported,
                "svg rendering needs a 2D iteration space, got " +
                    std::to_string(spec.dim) + "D");
  // Bounding box of the window: union of its tiles' boxes.
  std::optional<DomainBox> box;
  {
    const std::size_t t = spec.hyperplanes.size();
    IntVec idx(t, 0);
    while (true) {
      TileCoord tile{add(window.origin.coords, idx)};
      auto b = tile_bounding_box(spec, tile);
      if (!b)
        throw Error(ErrorCode::UnboundedTile, "tiles are unbounded");
      if (!box) {
        box = b;
      } else {
        for (std::size_t d = 0; d < 2; ++d) {
          box->lower[d] = std::min(box->lower[d], b->lower[d]);
          box->upper[d] = std::max(box->upper[d], b->upper[d]);
        }
      }
      std::size_t k = 0;
      for (; k < t; ++k) {
        if (++idx[k] < window.extent)
          break;
        idx[k] = 0;
      }
      if (k == t)
        break;
    }
  }

  struct Cell {
    IntVec x;
    TileCoord tile;
    int mars = -1;
  };
  std::map<std::pair<Int, Int>, Cell> cells;
  for_each_box_point(*box, [&](const IntVec &x) {
    if (!spec.in_domain(x))
      return;
    TileCoord t = tile_coord(x, spec);
    if (!detail::in_window(t, window))
      return;
    Cell c{x, std::move(t), -1};
    for (std::size_t m = 0; m < partition.mars.size(); ++m)
      if (partition.mars[m].set.member(x)) {
        c.mars = static_cast<int>(m);
        break;
      }
    cells.emplace(std::pair{x[0], x[1]}, std::move(c));
  });

  constexpr int cell = 20;
  constexpr int margin = 20;
  const Int xmin = box->lower[0], ymax = box->upper[1];
  const Int cols = box->upper[0] - box->lower[0] + 1;
  const Int rows = box->upper[1] - box->lower[1] + 1;
  const int legend_lines = static_cast<int>(partition.mars.size()) + 1;
  const Int width = 2 * margin + cols * cell;
  const Int height = 2 * margin + rows * cell + 24 * legend_lines + 10;
  auto px = [&](Int x) { return margin + (x - xmin) * cell; };
  auto py = [&](Int y) { return margin + (ymax - y) * cell; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
     << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\">\n"
     << "<title>" << detail::xml_escape(spec.name) << "</title>\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n<g id=\"cells\" stroke=\"#ffffff\" stroke-width=\"1\">\n";
  for (const auto &[key, c] : cells) {
    const std::string fill =
        c.mars < 0 ? detail::kInterior : detail::mars_color(static_cast<std::size_t>(c.mars));
    os << "<rect class=\"cell\" x=\"" << px(key.first) << "\" y=\"" << py(key.second)
       << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"" << fill
       << "\"/>\n";
  }
  os << "</g>\n<g id=\"tile-boundaries\" stroke=\"#000000\" stroke-width=\"2\">\n";
  for (const auto &[key, c] : cells) {
    // Right and upper neighbours; a boundary is drawn where the tile changes
    // or the window ends.
    const auto right = cells.find({key.first + 1, key.second});
    if (right == cells.end() || right->second.tile != c.tile)
      os << "<line x1=\"" << px(key.first) + cell << "\" y1=\"" << py(key.second)
         << "\" x2=\"" << px(key.first) + cell << "\" y2=\"" << py(key.second) + cell
         << "\"/>\n";
    const auto up = cells.find({key.first, key.second + 1});
    if (up == cells.end() || up->second.tile != c.tile)
      os << "<line x1=\"" << px(key.first) << "\" y1=\"" << py(key.second)
         << "\" x2=\"" << px(key.first) + cell << "\" y2=\"" << py(key.second)
         << "\"/>\n";
    const auto left = cells.find({key.first - 1, key.second});
    if (left == cells.end())
      os << "<line x1=\"" << px(key.first) << "\" y1=\"" << py(key.second)
         << "\" x2=\"" << px(key.first) << "\" y2=\"" << py(key.second) + cell
         << "\"/>\n";
    const auto down = cells.find({key.first, key.second - 1});
    if (down == cells.end())
      os << "<line x1=\"" << px(key.first) << "\" y1=\"" << py(key.second) + cell
         << "\" x2=\"" << px(key.first) + cell << "\" y2=\"" << py(key.second) + cell
         << "\"/>\n";
  }
  os << "</g>\n<g id=\"legend\" font-family=\"monospace\" font-size=\"12\">\n";
  const auto names = iterator_names(spec);
  Int ly = margin + rows * cell + 20;
  auto legend_row = [&](const std::string &color, const std::string &text) {
    os << "<rect x=\"" << margin << "\" y=\"" << ly - 11 << "\" width=\"14\" "
       << "height=\"14\" fill=\"" << color << "\"/>\n<text x=\"" << margin + 20
       << "\" y=\"" << ly << "\">" << detail::xml_escape(text) << "</text>\n";
    ly += 24;
  };
  for (std::size_t m = 0; m < partition.mars.size(); ++m)
    legend_row(detail::mars_color(m), partition.mars[m].signature.to_string() +
                                          "  " +
                                          to_string(partition.mars[m].set, names));
  legend_row(detail::kInterior, "not in flow-out");
  os << "</g>\n</svg>\n";
  return os.str();
}

/// Per-MARS point lists of one 3D tile; only MARS present in the tile appear.
inline nlohmann::ordered_json render_points3d(const ProblemSpec &spec,
                                              const PartitionResult &partition,
                                              const TileCoord &tile) {
  if (spec.dim != 3)
    throw Error(ErrorCode::DimensionUnsupported,
                "point dumps need a 3D iteration space, got " +
                    std::to_string(spec.dim) + "D");
  const auto names = iterator_names(spec);
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["iterators"] = names;
  j["tile"] = tile.coords;
  auto groups = nlohmann::ordered_json::array();
  const auto blocks = restrict_to_tile(partition, spec, tile);
  for (const auto &m : partition.mars) {
    auto it = blocks.find(m.signature);
    if (it == blocks.end())
      continue;
    nlohmann::ordered_json g;
    g["signature"] = signature_json(m.signature);
    g["closed_form"] = to_string(m.set, names);
    g["points"] = std::vector<IntVec>(it->second.begin(), it->second.end());
    groups.push_back(std::move(g));
  }
  j["groups"] = std::move(groups);
  return j;
}

} // namespace mars
