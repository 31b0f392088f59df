#pragma once

// The `hac` command line. Kept in a header so tests can drive every command
// in-process through run_cli().

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hac/baselines.hpp"
#include "hac/datagen.hpp"
#include "hac/io.hpp"
#include "hac/scenarios.hpp"
#include "hac/sketch.hpp"
#include "hac/tracker.hpp"

namespace hac::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitContract = 2;
inline constexpr int kExitFormat = 3;

/// Everything a config file may hold: the sketch parameters at top level,
/// plus optional "dedup" and "tracker" sections.
struct ConfigFile {
  HacConfig hac;
  DedupPolicy dedup;
  std::optional<tracker::TrackerConfig> tracker;
};

inline DedupPolicy dedup_from_json(const json& j) {
  io_detail::reject_unknown_keys(j, {"variant", "r_d"}, "dedup");
  DedupPolicy p;
  p.variant = dedup_variant_from_string(io_detail::get_or<std::string>(j, "variant", "none", "dedup"));
  p.r_d = io_detail::get_or<double>(j, "r_d", 0.0, "dedup");
  validate(p);
  return p;
}

inline tracker::TrackerConfig tracker_from_json(const json& j, const HacConfig& base) {
  io_detail::reject_unknown_keys(j,
                                 {"tau_s", "tau_l", "f", "step", "match_radius", "window_begin",
                                  "window_end", "face_threshold", "face_metric"},
                                 "tracker");
  tracker::TrackerConfig t;
  t.sketch = base;
  const std::string w = "tracker";
  t.tau_s = io_detail::get_or<double>(j, "tau_s", t.tau_s, w);
  if (j.contains("tau_l")) t.tau_l = io_detail::decode_timescale(j.at("tau_l"), "tracker.tau_l");
  t.f = io_detail::get_or<double>(j, "f", t.f, w);
  t.step = io_detail::get_or<double>(j, "step", t.step, w);
  t.match_radius = io_detail::get_or<double>(j, "match_radius", t.match_radius, w);
  t.window_begin = io_detail::get_or<double>(j, "window_begin", t.window_begin, w);
  t.window_end = io_detail::get_or<double>(j, "window_end", t.window_end, w);
  t.face_threshold = io_detail::get_or<double>(j, "face_threshold", t.face_threshold, w);
  t.face_metric = base_metric_from_string(io_detail::get_or<std::string>(j, "face_metric", "euclidean", w));
  tracker::validate(t);
  return t;
}

inline ConfigFile config_file_from_json(json j) {
  if (!j.is_object()) throw FormatError("config: expected a JSON object");
  ConfigFile c;
  json dedup, trk;
  if (j.contains("dedup")) {
    dedup = j.at("dedup");
    j.erase("dedup");
  }
  if (j.contains("tracker")) {
    trk = j.at("tracker");
    j.erase("tracker");
  }
  c.hac = config_from_json(j);
  if (!dedup.is_null()) c.dedup = dedup_from_json(dedup);
  if (!trk.is_null()) c.tracker = tracker_from_json(trk, c.hac);
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": malformed JSON (" + e.what() + ")");
  }
}

inline ConfigFile load_config_file(const std::string& path) { return config_file_from_json(read_json_file(path)); }

inline std::uint64_t parse_seed(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ContractError(what + ": not an unsigned integer: '" + s + "'");
  }
}

/// Effective seed: --seed, then HAC_SEED, then the config value.
inline std::uint64_t resolve_seed(std::uint64_t config_seed, const std::optional<std::uint64_t>& flag,
                                  const std::optional<std::string>& env) {
  if (flag) return *flag;
  if (env && !env->empty()) return parse_seed(*env, "HAC_SEED");
  return config_seed;
}

class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw FormatError("cannot write " + path);
      out_ = &file_;
    }
  }
  std::ostream& get() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline Dataset read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") return read_points(in);
  return read_points_file(path);
}

inline json record_to_json(const tracker::InteractionRecord& r) {
  return {{"t", r.time},
          {"camera", r.camera},
          {"position", r.position},
          {"object_feature", r.object_feature},
          {"human_feature", r.human_feature},
          {"score", r.score},
          {"event", r.appeared ? "appeared" : "disappeared"},
          {"multi_camera", r.multi_camera}};
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ContractError(what + ": bad number '" + item + "'");
    }
  }
  return v;
}

/// Runs the CLI on `args` (without the program name). Returns the exit code.
inline int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err,
                   const std::optional<std::string>& env_seed) {
  CLI::App app{"hop-and-count streaming dense region finder", "hac"};
  app.require_subcommand(1);

  std::string config_path, input_path, snapshot_path, out_path, dedup_name = "none", mode = "dense";
  std::optional<double> f, r, rd;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed_flag;

  auto* run = app.add_subcommand("run", "stream points through a sketch and write a snapshot");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--input", input_path, "JSONL points (default: stdin)");
  run->add_option("--snapshot", snapshot_path, "snapshot output path")->required();
  run->add_option("--seed", seed_flag, "overrides the config seed");

  auto* query = app.add_subcommand("query", "query a snapshot");
  query->add_option("--snapshot", snapshot_path, "snapshot to query")->required();
  query->add_option("--mode", mode, "dense | topk-freq | topk-radius")
      ->check(CLI::IsMember({"dense", "topk-freq", "topk-radius"}));
  query->add_option("--f", f, "frequency (dense, topk-radius)");
  query->add_option("--k", k, "number of outputs (topk modes)");
  query->add_option("--r", r, "radius (topk-freq); mapped to the smallest bucket radius >= r");
  query->add_option("--dedup", dedup_name, "none | threshold | theorem")
      ->check(CLI::IsMember({"none", "threshold", "theorem"}));
  query->add_option("--rd", rd, "separation for threshold dedup");
  query->add_option("--config", config_path, "config file supplying a default dedup policy");
  query->add_option("--out", out_path, "output JSONL (default: stdout)");

  std::string gen_kind;
  std::size_t gen_k = 3, gen_dims = 3, gen_n = 1000;
  double gen_sigma = 1.0, gen_sep = 0.0, gen_noise = 0.1;
  std::string gen_weights;
  std::string gen_profile;
  auto* gen = app.add_subcommand("gen", "generate synthetic streams");
  gen->add_option("kind", gen_kind, "mixture | household")->required()->check(CLI::IsMember({"mixture", "household"}));
  gen->add_option("--k", gen_k, "mixture: clusters");
  gen->add_option("--dims", gen_dims, "mixture: dimension");
  gen->add_option("--n", gen_n, "mixture: points");
  gen->add_option("--sigma", gen_sigma, "mixture: cluster std");
  gen->add_option("--separation", gen_sep, "mixture: pairwise mean distance (0: default ratio)");
  gen->add_option("--noise", gen_noise, "mixture: noise fraction");
  gen->add_option("--weights", gen_weights, "mixture: comma-separated cluster weights (default equal)");
  gen->add_option("--profile", gen_profile, "mixture preset: characters")->check(CLI::IsMember({"characters"}));
  gen->add_option("--seed", seed_flag, "seed");
  gen->add_option("--config", config_path, "config file supplying the seed");
  gen->add_option("--out", out_path, "mixture: output file; household: output prefix");

  std::string scenario;
  std::size_t seeds = 0;
  auto* bench = app.add_subcommand("bench", "run an acceptance scenario and write a JSON report");
  bench->add_option("scenario", scenario, "characters | guarantees | household")->required();
  bench->add_option("--seeds", seeds, "number of seeds (default per scenario)");
  bench->add_option("--seed", seed_flag, "first seed");
  bench->add_option("--out", out_path, "report path (default: stdout)");

  std::string objects_path, faces_path;
  auto* track = app.add_subcommand("track", "run the interaction tracker on object and face streams");
  track->add_option("--objects", objects_path, "object detections JSONL")->required();
  track->add_option("--faces", faces_path, "face detections JSONL")->required();
  track->add_option("--config", config_path, "config with a tracker section (default: household settings)");
  track->add_option("--seed", seed_flag, "sketch seed");
  track->add_option("--out", out_path, "records JSONL (default: stdout)");

  std::string eval_outputs, eval_data;
  std::size_t eval_n = 8;
  double eval_threshold = 0.5;
  auto* eval = app.add_subcommand("eval", "score an output file against labeled data");
  eval->add_option("--outputs", eval_outputs, "JSONL outputs (points or query results)")->required();
  eval->add_option("--data", eval_data, "labeled JSONL points")->required();
  eval->add_option("--n", eval_n, "number of main entities");
  eval->add_option("--threshold", eval_threshold, "entity match distance");
  eval->add_option("--out", out_path, "report path (default: stdout)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitContract;
  }

  try {
    if (*run) {
      ConfigFile cfg;
      if (!config_path.empty()) cfg = load_config_file(config_path);
      cfg.hac.seed = resolve_seed(cfg.hac.seed, seed_flag, env_seed);
      Sketch<Metric> sk(cfg.hac);
      const Dataset data = read_input(input_path, in);
      for (const auto& tp : data) sk.process(tp.point, tp.t);
      write_snapshot_file(snapshot_path, sk.state());
      out << json{{"points", sk.t_count()},
                  {"total_weight", sk.total_weight()},
                  {"slots", sk.total_slots()},
                  {"memory_cells", sk.memory_cells()}}
                 .dump()
          << '\n';
      return kExitOk;
    }
    if (*query) {
      const auto sk = Sketch<Metric>::from_state(read_snapshot_file(snapshot_path));
      DedupPolicy dedup;
      if (!config_path.empty()) dedup = load_config_file(config_path).dedup;
      if (query->count("--dedup") > 0) dedup.variant = dedup_variant_from_string(dedup_name);
      if (rd) dedup.r_d = *rd;
      if (dedup.variant == DedupVariant::threshold && !rd && config_path.empty()) {
        throw ContractError("--dedup threshold needs --rd");
      }
      validate(dedup);
      const double qt = sk.last_arrival_time();
      QueryResult res;
      if (mode == "dense") {
        if (!f) throw ContractError("--mode dense needs --f");
        res = sk.query_dense(*f, qt);
        if (dedup.variant != DedupVariant::none) res.outputs = apply_dedup(res.outputs, dedup, sk.distance());
      } else if (mode == "topk-freq") {
        if (!k) throw ContractError("--mode topk-freq needs --k");
        int idx = sk.config().c;
        if (r) {
          idx = bucket_index(sk.config(), *r);
          if (idx < 0) throw ContractError("--r exceeds the largest sketch radius");
        }
        res = sk.query_top_k_by_frequency(idx, *k, qt, dedup);
      } else {
        if (!f || !k) throw ContractError("--mode topk-radius needs --f and --k");
        res = sk.query_top_k_by_radius(*f, *k, qt, dedup);
      }
      OutputSink sink(out_path, out);
      for (const auto& o : res.outputs) sink.get() << output_to_json(o).dump() << '\n';
      return kExitOk;
    }
    if (*gen) {
      std::uint64_t cfg_seed = 0;
      if (!config_path.empty()) cfg_seed = load_config_file(config_path).hac.seed;
      const std::uint64_t s = resolve_seed(cfg_seed, seed_flag, env_seed);
      if (gen_kind == "mixture") {
        datagen::MixtureSpec spec;
        if (gen_profile == "characters") {
          spec = datagen::character_profile(gen_n, s);
        } else {
          spec.k = gen_k;
          spec.dims = gen_dims;
          spec.n = gen_n;
          spec.sigma = {gen_sigma};
          spec.separation = gen_sep;
          spec.noise_fraction = gen_noise;
          spec.seed = s;
          if (gen_weights.empty()) {
            spec.weights.assign(gen_k, (1.0 - gen_noise) / static_cast<double>(gen_k));
          } else {
            spec.weights = parse_list(gen_weights, "--weights");
          }
        }
        const auto data = datagen::gaussian_mixture_stream(spec);
        OutputSink sink(out_path, out);
        write_points(sink.get(), data);
        return kExitOk;
      }
      if (out_path.empty()) throw ContractError("gen household needs --out PREFIX");
      const auto spec = datagen::default_household(s);
      const auto hs = datagen::household_stream(spec);
      {
        OutputSink objects(out_path + "_objects.jsonl", out);
        write_points(objects.get(), hs.objects);
        OutputSink faces(out_path + "_faces.jsonl", out);
        write_points(faces.get(), hs.faces);
        OutputSink truth(out_path + "_truth.jsonl", out);
        for (const auto& e : hs.truth) {
          truth.get() << json{{"t", e.t}, {"human", e.human}, {"object", e.object},
                              {"action", e.pick ? "pick" : "place"}}
                             .dump()
                      << '\n';
        }
        OutputSink protos(out_path + "_prototypes.json", out);
        protos.get() << json{{"objects", hs.object_prototypes}, {"humans", hs.human_prototypes}}.dump() << '\n';
      }
      return kExitOk;
    }
    if (*bench) {
      const std::uint64_t first = resolve_seed(0, seed_flag, env_seed);
      std::size_t count = seeds;
      if (count == 0) count = scenario == "characters" ? 25 : scenario == "guarantees" ? 10 : 5;
      std::vector<std::uint64_t> list;
      for (std::size_t i = 0; i < count; ++i) list.push_back(first + i);
      const json report = scenarios::run_bench(scenario, list);
      OutputSink sink(out_path, out);
      sink.get() << report.dump(2) << '\n';
      return kExitOk;
    }
    if (*track) {
      const std::uint64_t base_seed = config_path.empty() ? 0 : load_config_file(config_path).hac.seed;
      const std::uint64_t s = resolve_seed(base_seed, seed_flag, env_seed);
      tracker::TrackerConfig tc = scenarios::household_tracker_config(s);
      if (!config_path.empty()) {
        const auto cfg = load_config_file(config_path);
        if (!cfg.tracker) throw ContractError("config has no tracker section");
        tc = *cfg.tracker;
        tc.sketch.seed = s;
      }
      const auto run_out = tracker::run_tracker(read_points_file(objects_path), read_points_file(faces_path), tc);
      OutputSink sink(out_path, out);
      for (const auto& rec : run_out.records) sink.get() << record_to_json(rec).dump() << '\n';
      return kExitOk;
    }
    if (*eval) {
      // Accepts plain points as well as query outputs; time and query fields are ignored.
      std::vector<Point> outputs;
      {
        std::ifstream f_in(eval_outputs);
        if (!f_in) throw FormatError("cannot open " + eval_outputs);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(f_in, line)) {
          ++lineno;
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          json j;
          try {
            j = json::parse(line);
          } catch (const json::parse_error& e) {
            throw FormatError("line " + std::to_string(lineno) + ": malformed JSON (" + e.what() + ")");
          }
          outputs.push_back(point_from_json(j, "line " + std::to_string(lineno)));
        }
      }
      const Dataset data = read_points_file(eval_data, false);
      const Metric dist(MetricSpec::euclidean());
      const auto rep = baselines::eval_top_n(outputs, data, eval_n, eval_threshold, dist);
      OutputSink sink(out_path, out);
      sink.get() << json{{"n", rep.n},
                         {"found", rep.found},
                         {"wrong", rep.wrong},
                         {"duplicate", rep.duplicate},
                         {"missing", rep.missing}}
                        .dump()
                 << '\n';
      return kExitOk;
    }
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFormat;
  }
  return kExitContract;
}

}  // namespace hac::cli
