// Command-line front end for the MARS library.
//
//   mars validate --spec sw.json
//   mars mars --spec sw.json [--format json]
//   mars bench [--format json]

#include "mars/mars.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

using namespace mars;

enum ExitCode : int { kOk = 0, kError = 1, kUsage = 2, kMismatch = 3 };

struct Options {
  std::string spec_path;
  std::string tile_sizes;
  std::string out;
  std::string format = "table";
  std::string mode;
  std::string tile;
  Int window = 3;
  bool exhaustive = false;
  bool oracle_check = false;
};

IntVec parse_csv(const std::string &text, const std::string &flag) {
  IntVec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoll(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw Error(ErrorCode::ParseError, flag + ": bad integer '" + item + "'");
    }
  }
  if (v.empty())
    throw Error(ErrorCode::ParseError, flag + ": empty list");
  return v;
}

ProblemSpec load(const Options &o) {
  if (o.spec_path.empty())
    throw Error(ErrorCode::ParseError, "--spec is required");
  ProblemSpec spec = load_spec(o.spec_path);
  if (!o.tile_sizes.empty())
    spec = with_tile_sizes(spec, parse_csv(o.tile_sizes, "--tile-sizes"));
  return spec;
}

AnalyzeOptions analyze_options(const Options &o) {
  AnalyzeOptions a;
  a.partition.exhaustive = o.exhaustive;
  if (!o.tile.empty())
    a.tile = TileCoord{parse_csv(o.tile, "--tile")};
  return a;
}

void emit(const Options &o, const std::string &text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f)
    throw Error(ErrorCode::FileNotFound, "cannot write " + o.out);
  f << text;
}

int cmd_validate(const Options &o) {
  const ProblemSpec spec = load(o);
  const ValidationResult r = validate(spec);
  if (r) {
    emit(o, spec.name + ": OK\n");
    return kOk;
  }
  std::cerr << spec.name << ": " << to_string(*r.error) << ": " << r.message << "\n";
  return kError;
}

int cmd_flow(const Options &o, Direction dir) {
  const ProblemSpec spec = load(o);
  const FlowResult flow = dir == Direction::Forward ? flow_out(spec) : flow_in(spec);
  const TileCoord tile =
      o.tile.empty() ? oracle::sample_tile(spec) : TileCoord{parse_csv(o.tile, "--tile")};
  const auto names = iterator_names(spec);

  const auto inside = points_in_tile(flow.whole, spec, tile);
  std::size_t producers = 0;
  bool mismatch = false;
  if (dir == Direction::Forward) {
    if (o.oracle_check) {
      const auto truth = oracle::flow_out(spec, tile);
      mismatch = std::set<IntVec>(inside.begin(), inside.end()) != truth;
    }
  } else {
    const auto prod = flow_in_producers(spec, flow, tile);
    producers = prod.size();
    if (o.oracle_check) {
      mismatch = prod != oracle::flow_in(spec, tile) ||
                 std::set<IntVec>(inside.begin(), inside.end()) !=
                     oracle::reader_points(spec, tile);
    }
  }

  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["name"] = spec.name;
    j["direction"] = dir == Direction::Forward ? "out" : "in";
    j["closed_form"] = to_string(flow.whole, names);
    auto parts = nlohmann::ordered_json::array();
    for (const auto &[key, set] : flow.per_dependence) {
      if (set.trivially_empty())
        continue;
      parts.push_back({{"hyperplane", key.first},
                       {"dependence", spec.dependences[key.second]},
                       {"closed_form", to_string(set, names)}});
    }
    j["per_dependence"] = std::move(parts);
    j["sample_tile"] = tile.coords;
    j["points_in_tile"] = inside.size();
    if (dir == Direction::Backward)
      j["producer_points"] = producers;
    if (o.oracle_check)
      j["oracle_check"] = mismatch ? "mismatch" : "ok";
    emit(o, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << spec.name << " flow-" << (dir == Direction::Forward ? "out" : "in") << ": "
       << to_string(flow.whole, names) << "\n";
    for (const auto &[key, set] : flow.per_dependence) {
      if (set.trivially_empty())
        continue;
      os << "  hyperplane " << format_linear(spec.hyperplanes[key.first].normal, names)
         << ", dependence " << detail::vec_str(spec.dependences[key.second]) << ": "
         << to_string(set, names) << "\n";
    }
    if (dir == Direction::Forward) {
      os << "points per tile " << detail::vec_str(tile.coords) << ": " << inside.size()
         << "\n";
    } else {
      os << "reading points in tile " << detail::vec_str(tile.coords) << ": "
         << inside.size() << "\n";
      os << "producer points read by the tile: " << producers << "\n";
    }
    if (o.oracle_check)
      os << "oracle check: " << (mismatch ? "MISMATCH" : "ok") << "\n";
    emit(o, os.str());
  }
  return mismatch ? kMismatch : kOk;
}

int cmd_mars(const Options &o, bool stats) {
  const ProblemSpec spec = load(o);
  const ConfigReport r = analyze(spec, analyze_options(o));
  if (o.format == "json")
    emit(o, to_json(r).dump(2) + "\n");
  else if (stats)
    emit(o, format_table({r}) + "\nnaive per-consumer read volume: " +
                std::to_string(r.naive_overlap_volume) + "\n" + format_mars_listing(r));
  else
    emit(o, format_mars_listing(r));
  return kOk;
}

int cmd_render(const Options &o) {
  const ProblemSpec spec = load(o);
  const std::string mode = o.mode.empty() ? (spec.dim == 2 ? "svg2d" : "points3d") : o.mode;
  PartitionOptions popts;
  popts.exhaustive = o.exhaustive;
  const PartitionResult part = mars_partition(spec, popts);
  if (o.oracle_check) {
    const TileCoord tile = oracle::sample_tile(spec);
    detail::cross_check(restrict_to_tile(part, spec, tile), oracle::mars(spec, tile));
  }
  if (mode == "svg2d") {
    RenderWindow w = default_window(spec);
    if (!o.tile.empty())
      w.origin = TileCoord{parse_csv(o.tile, "--tile")};
    w.extent = o.window;
    emit(o, render_svg2d(spec, part, w));
  } else if (mode == "points3d") {
    const TileCoord tile =
        o.tile.empty() ? oracle::sample_tile(spec) : TileCoord{parse_csv(o.tile, "--tile")};
    emit(o, render_points3d(spec, part, tile).dump(2) + "\n");
  } else {
    throw Error(ErrorCode::ParseError, "--mode must be svg2d or points3d");
  }
  return kOk;
}

int cmd_bench(const Options &o) {
  std::vector<ConfigReport> reports;
  std::vector<std::vector<std::string>> extra;
  bool all_match = true;
  for (const auto &b : benchmarks::all()) {
    if (!b.in_table)
      continue;
    ProblemSpec spec = b.spec;
    if (!o.tile_sizes.empty())
      spec = with_tile_sizes(spec, parse_csv(o.tile_sizes, "--tile-sizes"));
    const auto start = std::chrono::steady_clock::now();
    ConfigReport r = analyze(spec, analyze_options(o));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto &e = b.expected;
    const bool match = r.consumer_tiles == e.consumer_tiles && r.mars_nonempty == e.mars &&
                       r.singletons == e.singletons && r.mars_raw == e.mars_raw;
    all_match = all_match && match;
    std::ostringstream t;
    t << std::fixed << std::setprecision(3) << secs;
    extra.push_back({std::to_string(e.consumer_tiles) + "/" + std::to_string(e.mars) + "/" +
                         std::to_string(e.singletons),
                     match ? "yes" : "NO", t.str()});
    reports.push_back(std::move(r));
  }
  if (o.format == "json") {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &r : reports)
      arr.push_back(to_json(r));
    emit(o, arr.dump(2) + "\n");
  } else {
    emit(o, format_table(reports, {"Reference", "Match", "Seconds"}, extra));
  }
  return all_match ? kOk : kMismatch;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Maximal atomic irredundant sets of tiled uniform-dependence programs"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App *sub, bool needs_spec) {
    if (needs_spec)
      sub->add_option("--spec", o.spec_path, "Problem spec file (JSON)")->required();
    sub->add_option("--tile-sizes", o.tile_sizes,
                    "Comma-separated tile sizes (one value applies to every family)");
    sub->add_option("--out", o.out, "Write output to this file instead of stdout");
    sub->add_flag("--exhaustive", o.exhaustive,
                  "Draw candidate signatures from every neighbour tile");
    sub->add_flag("--oracle-check", o.oracle_check,
                  "Cross-check symbolic results against brute-force enumeration");
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--tile", o.tile, "Comma-separated tile coordinates");
  };

  auto *validate_cmd = app.add_subcommand("validate", "Check tiling legality");
  common(validate_cmd, true);
  auto *flow_out_cmd = app.add_subcommand("flow-out", "Flow-out set");
  common(flow_out_cmd, true);
  auto *flow_in_cmd = app.add_subcommand("flow-in", "Flow-in set");
  common(flow_in_cmd, true);
  auto *mars_cmd = app.add_subcommand("mars", "MARS of a spec");
  common(mars_cmd, true);
  auto *stats_cmd = app.add_subcommand("stats", "Statistics report");
  common(stats_cmd, true);
  auto *render_cmd = app.add_subcommand("render", "SVG (2D) or point dump (3D)");
  common(render_cmd, true);
  render_cmd->add_option("--mode", o.mode, "svg2d or points3d")
      ->check(CLI::IsMember({"svg2d", "points3d"}));
  render_cmd->add_option("--window", o.window, "Tiles per family to draw")
      ->check(CLI::PositiveNumber);
  auto *bench_cmd = app.add_subcommand("bench", "Run all bundled benchmarks");
  common(bench_cmd, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd)
      return cmd_validate(o);
    if (*flow_out_cmd)
      return cmd_flow(o, Direction::Forward);
    if (*flow_in_cmd)
      return cmd_flow(o, Direction::Backward);
    if (*mars_cmd)
      return cmd_mars(o, false);
    if (*stats_cmd)
      return cmd_mars(o, true);
    if (*render_cmd)
      return cmd_render(o);
    if (*bench_cmd)
      return cmd_bench(o);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::OracleMismatch ? kMismatch : kError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kUsage;
}
