#pragma once

// JSON encodings shared by the CLI, the snapshot format and the generators.
//
// Point lines: {"t": 12.5, "x": [..], "pos": [..], "label": "c3"}
// "pos" and "label" are optional.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "hac/config.hpp"
#include "hac/error.hpp"
#include "hac/metric.hpp"
#include "hac/output.hpp"
#include "hac/point.hpp"
#include "hac/sketch.hpp"

namespace hac {

using json = nlohmann::json;

namespace io_detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ContractError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ContractError(where + "." + key + ": wrong type");
  }
}

// JSON has no infinity; timescales are written as the string "inf".
inline json encode_timescale(double tau) {
  if (std::isinf(tau)) return "inf";
  return tau;
}

inline double decode_timescale(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "inf") return kInfiniteTimescale;
  if (j.is_number()) return j.get<double>();
  throw ContractError(where + ": expected a number or \"inf\"");
}

}  // namespace io_detail

// ---- points --------------------------------------------------------------

inline json point_to_json(const Point& p) {
  json j;
  j["x"] = p.x;
  if (p.pos) j["pos"] = *p.pos;
  if (p.label) j["label"] = *p.label;
  return j;
}

inline json timed_point_to_json(const TimedPoint& tp) {
  json j = point_to_json(tp.point);
  j["t"] = tp.t;
  return j;
}

inline Point point_from_json(const json& j, const std::string& where) {
  Point p;
  try {
    if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
    if (!j.contains("x")) throw FormatError(where + ": missing \"x\"");
    p.x = j.at("x").get<std::vector<double>>();
    if (j.contains("pos")) p.pos = j.at("pos").get<std::vector<double>>();
    if (j.contains("label")) p.label = j.at("label").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
  return p;
}

inline TimedPoint timed_point_from_json(const json& j, const std::string& where) {
  TimedPoint tp{point_from_json(j, where), 0.0};
  if (!j.contains("t") || !j.at("t").is_number()) throw FormatError(where + ": missing numeric \"t\"");
  tp.t = j.at("t").get<double>();
  return tp;
}

/// Reads canonical point lines; blank lines are skipped. Errors cite the
/// 1-based line number.
inline Dataset read_points(std::istream& in, bool require_ordered = true) {
  Dataset data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(where + ": malformed JSON (" + e.what() + ")");
    }
    TimedPoint tp = timed_point_from_json(j, where);
    if (require_ordered && !data.empty() && tp.t < data.back().t) {
      throw ContractError(where + ": timestamp " + std::to_string(tp.t) +
                          " precedes previous timestamp " + std::to_string(data.back().t));
    }
    data.push_back(std::move(tp));
  }
  return data;
}

inline Dataset read_points_file(const std::string& path, bool require_ordered = true) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_points(in, require_ordered);
}

inline void write_points(std::ostream& out, const Dataset& data) {
  for (const auto& tp : data) out << timed_point_to_json(tp).dump() << '\n';
}

// ---- outputs ---------------------------------------------------------------

inline json output_to_json(const Output& o) {
  json j = point_to_json(o.point);
  j["radius_index"] = o.radius_index;
  j["radius"] = o.radius;
  j["freq"] = o.freq_estimate;
  j["slot"] = o.slot_id;
  j["hop_time"] = o.hop_time;
  return j;
}

inline Output output_from_json(const json& j, const std::string& where) {
  Output o;
  o.point = point_from_json(j, where);
  try {
    o.radius_index = j.at("radius_index").get<int>();
    o.radius = j.at("radius").get<double>();
    o.freq_estimate = j.at("freq").get<double>();
    o.slot_id = j.at("slot").get<std::size_t>();
    o.hop_time = j.at("hop_time").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
  return o;
}

// ---- config ---------------------------------------------------------------

inline json metric_to_json(const MetricSpec& m) {
  json j;
  j["kind"] = std::string(to_string(m.kind));
  if (m.kind == MetricKind::composite) {
    j["feature"] = std::string(to_string(m.feature));
    j["position"] = std::string(to_string(m.position));
    j["feature_scale"] = m.feature_scale;
    j["position_scale"] = m.position_scale;
  }
  if (m.allow_non_metric) j["allow_non_metric"] = true;
  return j;
}

inline MetricSpec metric_from_json(const json& j) {
  io_detail::reject_unknown_keys(
      j, {"kind", "feature", "position", "feature_scale", "position_scale", "allow_non_metric"},
      "metric");
  MetricSpec m;
  m.kind = metric_kind_from_string(io_detail::get_or<std::string>(j, "kind", "euclidean", "metric"));
  m.feature = base_metric_from_string(io_detail::get_or<std::string>(j, "feature", "euclidean", "metric"));
  m.position = base_metric_from_string(io_detail::get_or<std::string>(j, "position", "euclidean", "metric"));
  m.allow_non_metric = io_detail::get_or<bool>(j, "allow_non_metric", false, "metric");
  if (m.kind == MetricKind::composite) {
    if (!j.contains("feature_scale") || !j.contains("position_scale")) {
      throw ContractError("metric: composite requires explicit feature_scale and position_scale");
    }
  }
  m.feature_scale = io_detail::get_or<double>(j, "feature_scale", 1.0, "metric");
  m.position_scale = io_detail::get_or<double>(j, "position_scale", 1.0, "metric");
  validate(m);
  return m;
}

inline json config_to_json(const HacConfig& c) {
  json j;
  j["f0"] = c.f0;
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["r0"] = c.r0;
  j["gamma"] = c.gamma;
  j["c"] = c.c;
  j["tau"] = io_detail::encode_timescale(c.tau);
  j["metric"] = metric_to_json(c.metric);
  j["seed"] = c.seed;
  return j;
}

inline HacConfig config_from_json(const json& j) {
  io_detail::reject_unknown_keys(
      j, {"f0", "epsilon", "delta", "r0", "gamma", "c", "tau", "metric", "seed"}, "config");
  HacConfig c;
  c.f0 = io_detail::get_or<double>(j, "f0", c.f0, "config");
  c.epsilon = io_detail::get_or<double>(j, "epsilon", c.epsilon, "config");
  c.delta = io_detail::get_or<double>(j, "delta", c.delta, "config");
  c.r0 = io_detail::get_or<double>(j, "r0", c.r0, "config");
  c.gamma = io_detail::get_or<double>(j, "gamma", c.gamma, "config");
  c.c = io_detail::get_or<int>(j, "c", c.c, "config");
  if (j.contains("tau")) c.tau = io_detail::decode_timescale(j.at("tau"), "config.tau");
  if (j.contains("metric")) c.metric = metric_from_json(j.at("metric"));
  c.seed = io_detail::get_or<std::uint64_t>(j, "seed", c.seed, "config");
  validate(c);
  return c;
}

// ---- snapshot -------------------------------------------------------------

inline constexpr const char* kSnapshotMagic = "hac-snapshot";
inline constexpr int kSnapshotVersion = 1;

/// Versioned JSON dump of a sketch. Doubles are written in shortest
/// round-trip form, so a load reproduces every counter bit for bit.
inline json snapshot_to_json(const SketchState& s) {
  json j;
  j["magic"] = kSnapshotMagic;
  j["version"] = kSnapshotVersion;
  j["config"] = config_to_json(s.config);
  j["slot_offset"] = s.slot_offset;
  j["t_count"] = s.t_count;
  j["total_weight"] = s.total_weight;
  j["last_arrival_time"] = s.last_arrival_time;
  json slots = json::array();
  for (const auto& slot : s.slots) {
    json js;
    js["held"] = slot.held ? point_to_json(*slot.held) : json(nullptr);
    js["hop_time"] = slot.hop_time;
    js["counters"] = slot.counters;
    js["last_decay_time"] = slot.last_decay_time;
    slots.push_back(std::move(js));
  }
  j["slots"] = std::move(slots);
  return j;
}

inline SketchState snapshot_from_json(const json& j) {
  if (!j.is_object() || !j.contains("magic") || j.at("magic") != kSnapshotMagic) {
    throw FormatError("not a hop-and-count snapshot (bad magic)");
  }
  if (!j.contains("version") || j.at("version") != kSnapshotVersion) {
    throw FormatError("unsupported snapshot version " +
                      (j.contains("version") ? j.at("version").dump() : std::string("<missing>")) +
                      " (expected " + std::to_string(kSnapshotVersion) + ")");
  }
  SketchState s;
  try {
    s.config = config_from_json(j.at("config"));
    s.slot_offset = j.at("slot_offset").get<std::size_t>();
    s.t_count = j.at("t_count").get<std::uint64_t>();
    s.total_weight = j.at("total_weight").get<double>();
    s.last_arrival_time = j.at("last_arrival_time").get<double>();
    for (const auto& js : j.at("slots")) {
      SampleSlot slot;
      if (!js.at("held").is_null()) slot.held = point_from_json(js.at("held"), "snapshot slot");
      slot.hop_time = js.at("hop_time").get<double>();
      slot.counters = js.at("counters").get<std::vector<double>>();
      slot.last_decay_time = js.at("last_decay_time").get<double>();
      s.slots.push_back(std::move(slot));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt snapshot: ") + e.what());
  }
  return s;
}

inline void write_snapshot_file(const std::string& path, const SketchState& s) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << snapshot_to_json(s).dump() << '\n';
}

inline SketchState read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": malformed JSON (" + e.what() + ")");
  }
  return snapshot_from_json(j);
}

}  // namespace hac
