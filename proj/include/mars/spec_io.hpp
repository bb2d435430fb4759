#pragma once

/// JSON problem-spec files:
///
///   { "name": "sw", "dim": 2,
///     "dependences": [[1,0],[0,1],[1,1]],
///     "hyperplanes": [{"normal": [1,1], "tile_size": 4}, ...],
///     "domain": {"lower": [0,0], "upper": [100,100]} | "infinite",
///     "iterators": ["i", "j"] }            // optional
///
/// Parse errors name the offending field.

#include "mars/core_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace mars {

namespace detail {

inline Error field_error(const std::string &field, const std::string &what) {
  return Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

inline const nlohmann::json &require(const nlohmann::json &j,
                                     const std::string &field) {
  if (!j.contains(field))
    throw field_error(field, "missing");
  return j.at(field);
}

inline Int as_int(const nlohmann::json &j, const std::string &field) {
  if (!j.is_number_integer())
    throw field_error(field, "expected an integer, got " + j.dump());
  return j.get<Int>();
}

inline IntVec as_int_vec(const nlohmann::json &j, const std::string &field) {
  if (!j.is_array())
    throw field_error(field, "expected an array of integers, got " + j.dump());
  IntVec v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(as_int(j[i], field + "[" + std::to_string(i) + "]"));
  return v;
}

} // namespace detail

/// Parses and structurally checks a spec. Tiling legality is left to
/// `validate`.
inline ProblemSpec spec_from_json(const nlohmann::json &j) {
  using namespace detail;
  if (!j.is_object())
    throw Error(ErrorCode::ParseError, "spec must be a JSON object");
  ProblemSpec spec;
  const auto &name = require(j, "name");
  if (!name.is_string())
    throw field_error("name", "expected a string");
  spec.name = name.get<std::string>();

  const Int dim = as_int(require(j, "dim"), "dim");
  if (dim < 1)
    throw field_error("dim", "must be at least 1");
  spec.dim = static_cast<std::size_t>(dim);

  const auto &deps = require(j, "dependences");
  if (!deps.is_array() || deps.empty())
    throw field_error("dependences", "expected a nonempty array");
  for (std::size_t i = 0; i < deps.size(); ++i) {
    const std::string field = "dependences[" + std::to_string(i) + "]";
    IntVec b = as_int_vec(deps[i], field);
    if (b.size() != spec.dim)
      throw field_error(field, "expected " + std::to_string(spec.dim) + " entries");
    if (is_zero(b))
      throw field_error(field, "zero dependence vector");
    spec.dependences.push_back(std::move(b));
  }

  const auto &hyps = require(j, "hyperplanes");
  if (!hyps.is_array() || hyps.empty())
    throw field_error("hyperplanes", "expected a nonempty array");
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const std::string field = "hyperplanes[" + std::to_string(i) + "]";
    if (!hyps[i].is_object())
      throw field_error(field, "expected an object");
    Hyperplane h;
    h.normal = as_int_vec(require(hyps[i], "normal"), field + ".normal");
    if (h.normal.size() != spec.dim)
      throw field_error(field + ".normal",
                        "expected " + std::to_string(spec.dim) + " entries");
    if (is_zero(h.normal))
      throw field_error(field + ".normal", "zero normal vector");
    h.tile_size = as_int(require(hyps[i], "tile_size"), field + ".tile_size");
    if (h.tile_size < 1)
      throw field_error(field + ".tile_size", "must be at least 1");
    spec.hyperplanes.push_back(std::move(h));
  }

  if (j.contains("domain")) {
    const auto &d = j.at("domain");
    if (d.is_string()) {
      if (d.get<std::string>() != "infinite")
        throw field_error("domain", "expected \"infinite\" or a box");
    } else if (d.is_object()) {
      DomainBox box{as_int_vec(require(d, "lower"), "domain.lower"),
                    as_int_vec(require(d, "upper"), "domain.upper")};
      if (box.lower.size() != spec.dim || box.upper.size() != spec.dim)
        throw field_error("domain", "bounds must have " +
                                        std::to_string(spec.dim) + " entries");
      for (std::size_t d2 = 0; d2 < spec.dim; ++d2)
        if (box.lower[d2] > box.upper[d2])
          throw field_error("domain", "lower exceeds upper");
      spec.domain = std::move(box);
    } else {
      throw field_error("domain", "expected \"infinite\" or a box");
    }
  }

  if (j.contains("iterators")) {
    const auto &it = j.at("iterators");
    if (!it.is_array() || it.size() != spec.dim)
      throw field_error("iterators",
                        "expected " + std::to_string(spec.dim) + " names");
    for (const auto &n : it) {
      if (!n.is_string())
        throw field_error("iterators", "expected strings");
      spec.iterators.push_back(n.get<std::string>());
    }
  }
  return spec;
}

inline nlohmann::ordered_json spec_to_json(const ProblemSpec &spec) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["dim"] = spec.dim;
  j["dependences"] = spec.dependences;
  auto hyps = nlohmann::ordered_json::array();
  for (const auto &h : spec.hyperplanes)
    hyps.push_back({{"normal", h.normal}, {"tile_size", h.tile_size}});
  j["hyperplanes"] = std::move(hyps);
  if (spec.domain)
    j["domain"] = {{"lower", spec.domain->lower}, {"upper", spec.domain->upper}};
  else
    j["domain"] = "infinite";
  if (!spec.iterators.empty())
    j["iterators"] = spec.iterators;
  return j;
}

inline ProblemSpec parse_spec(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return spec_from_json(j);
}

inline ProblemSpec load_spec(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::FileNotFound, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(ss.str());
  } catch (const Error &e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

} // namespace mars
