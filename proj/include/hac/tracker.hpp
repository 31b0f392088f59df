#pragma once

// Two-timescale interaction tracker. A short-timescale sketch over object
// detections is queried periodically; regions that appear or disappear
// between consecutive snapshots are pick/place events, unless the region is
// also dense for the long-timescale sketch (a stable object). Each event is
// credited to the faces seen on the same camera shortly before the region
// changed state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hac/config.hpp"
#include "hac/error.hpp"
#include "hac/metric.hpp"
#include "hac/output.hpp"
#include "hac/point.hpp"
#include "hac/sketch.hpp"

namespace hac::tracker {

struct InteractionRecord {
  std::vector<double> object_feature;
  std::vector<double> human_feature;
  double score = 0.0;
  /// Query time at which the event was detected.
  double time = 0.0;
  std::vector<double> position;
  int camera = 0;
  bool appeared = true;
  /// The event's region had detections on more than one camera.
  bool multi_camera = false;
};

struct TrackerConfig {
  /// Sketch parameters shared by both sketches; f0 is forced to f and tau
  /// is replaced by tau_s / tau_l.
  HacConfig sketch;
  double tau_s = 10.0;
  double tau_l = kInfiniteTimescale;
  double f = 0.025;
  double step = 10.0;
  /// Radius for matching outputs across snapshots; <= 0 means the largest
  /// query radius of the sketch.
  double match_radius = 0.0;
  /// Faces are collected over [t - window_begin * tau_s, t - window_end * tau_s].
  double window_begin = 2.0;
  double window_end = 1.0;
  /// Two face detections closer than this are the same person.
  double face_threshold = 0.5;
  BaseMetric face_metric = BaseMetric::euclidean;
};

inline void validate(const TrackerConfig& c) {
  if (!(c.tau_s > 0.0) || !(c.tau_s < c.tau_l)) throw ContractError("tracker: need 0 < tau_s < tau_l");
  if (!(c.step > 0.0)) throw ContractError("tracker: step must be positive");
  if (!(c.f > 0.0 && c.f <= 1.0)) throw ContractError("tracker: f must be in (0, 1]");
  if (!(c.window_begin >= c.window_end) || !(c.window_end >= 0.0)) {
    throw ContractError("tracker: attribution window must satisfy window_begin >= window_end >= 0");
  }
  if (!(c.face_threshold >= 0.0)) throw ContractError("tracker: face_threshold must be >= 0");
}

inline HacConfig sketch_config(const TrackerConfig& c, double tau) {
  HacConfig s = c.sketch;
  s.f0 = c.f;
  s.tau = tau;
  return s;
}

inline double effective_match_radius(const TrackerConfig& c) {
  return c.match_radius > 0.0 ? c.match_radius : max_radius(c.sketch);
}

struct SnapshotDiff {
  std::vector<Output> appeared;
  std::vector<Output> disappeared;
};

template <class Distance>
SnapshotDiff snapshot_diff(const std::vector<Output>& prev, const std::vector<Output>& cur,
                           double match_radius, const Distance& dist) {
  auto unmatched = [&](const std::vector<Output>& from, const std::vector<Output>& against) {
    std::vector<Output> out;
    for (const auto& o : from) {
      const bool matched = std::any_of(against.begin(), against.end(), [&](const Output& a) {
        return dist(o.point, a.point) <= match_radius;
      });
      if (!matched) out.push_back(o);
    }
    return out;
  };
  return {unmatched(cur, prev), unmatched(prev, cur)};
}

inline int camera_of(const Point& p) {
  if (!p.pos || p.pos->empty()) throw ContractError("tracker: detection without a camera position");
  return static_cast<int>(std::lround((*p.pos)[0]));
}

/// Distinct faces seen on `camera` with timestamps in [lo, hi]: greedy in
/// time order, a detection starts a new face unless it is within
/// face_threshold of one already chosen. `faces` must be time-ordered.
inline std::vector<Point> faces_in_window(const Dataset& faces, int camera, double lo, double hi,
                                          double face_threshold, BaseMetric metric) {
  auto first = std::lower_bound(faces.begin(), faces.end(), lo,
                                [](const TimedPoint& tp, double t) { return tp.t < t; });
  std::vector<Point> distinct;
  for (auto it = first; it != faces.end() && it->t <= hi; ++it) {
    if (camera_of(it->point) != camera) continue;
    const bool known = std::any_of(distinct.begin(), distinct.end(), [&](const Point& f) {
      return block_distance(metric, f.x, it->point.x) <= face_threshold;
    });
    if (!known) distinct.push_back(it->point);
  }
  return distinct;
}

/// One record per distinct face present in the window, each scored
/// 1/|faces|; no faces, no records.
inline std::vector<InteractionRecord> attribute(const Output& event, bool appeared, double time,
                                                const Dataset& faces, double lo, double hi,
                                                double face_threshold,
                                                BaseMetric metric = BaseMetric::euclidean,
                                                bool multi_camera = false) {
  const int camera = camera_of(event.point);
  const auto present = faces_in_window(faces, camera, lo, hi, face_threshold, metric);
  std::vector<InteractionRecord> out;
  for (const auto& f : present) {
    InteractionRecord r;
    r.object_feature = event.point.x;
    r.human_feature = f.x;
    r.score = 1.0 / static_cast<double>(present.size());
    r.time = time;
    r.position = *event.point.pos;
    r.camera = camera;
    r.appeared = appeared;
    r.multi_camera = multi_camera;
    out.push_back(std::move(r));
  }
  return out;
}

struct TrackerEvent {
  double time = 0.0;
  bool appeared = true;
  bool stable = false;
  Output region;
  std::size_t records = 0;
};

struct TrackerRun {
  std::vector<InteractionRecord> records;
  std::vector<TrackerEvent> events;
};

namespace detail {

inline void check_ordered(const Dataset& d, const char* name) {
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i].t < d[i - 1].t) {
      throw ContractError(std::string("tracker: ") + name + " stream time regression at index " +
                          std::to_string(i));
    }
  }
}

}  // namespace detail

/// Feeds object detections into a tau_s and a tau_l sketch, queries every
/// `step` seconds starting one step after the first detection, and turns
/// snapshot differences into interaction records. The first snapshot only
/// establishes the baseline.
inline TrackerRun run_tracker(const Dataset& objects, const Dataset& faces, const TrackerConfig& cfg) {
  validate(cfg);
  detail::check_ordered(objects, "object");
  detail::check_ordered(faces, "face");
  TrackerRun run;
  if (objects.empty()) return run;

  Sketch<Metric> short_sk(sketch_config(cfg, cfg.tau_s));
  Sketch<Metric> long_sk(sketch_config(cfg, cfg.tau_l));
  const Metric& dist = short_sk.distance();
  const double match = effective_match_radius(cfg);

  std::optional<std::vector<Output>> prev;
  auto snapshot = [&](double t) {
    auto cur = short_sk.query_dense(cfg.f, t).outputs;
    if (prev) {
      const auto diff = snapshot_diff(*prev, cur, match, dist);
      const auto stable = long_sk.query_dense(cfg.f, t).outputs;
      auto handle = [&](const Output& ev, bool appeared, const std::vector<Output>& region_of) {
        TrackerEvent te{t, appeared, false, ev, 0};
        te.stable = std::any_of(stable.begin(), stable.end(), [&](const Output& s) {
          return dist(s.point, ev.point) <= match;
        });
        if (!te.stable) {
          bool multi = false;
          const int cam = camera_of(ev.point);
          for (const auto& o : region_of) {
            if (dist(o.point, ev.point) <= match && camera_of(o.point) != cam) multi = true;
          }
          auto recs = attribute(ev, appeared, t, faces, t - cfg.window_begin * cfg.tau_s,
                                t - cfg.window_end * cfg.tau_s, cfg.face_threshold,
                                cfg.face_metric, multi);
          te.records = recs.size();
          run.records.insert(run.records.end(), recs.begin(), recs.end());
        }
        run.events.push_back(std::move(te));
      };
      // Several slots usually sample the same region; report it once.
      const DedupPolicy one_per_region{DedupVariant::threshold, match};
      for (const auto& o : apply_dedup(diff.appeared, one_per_region, dist)) handle(o, true, cur);
      for (const auto& o : apply_dedup(diff.disappeared, one_per_region, dist)) handle(o, false, *prev);
    }
    prev = std::move(cur);
  };

  double next_query = objects.front().t + cfg.step;
  for (const auto& tp : objects) {
    while (tp.t > next_query) {
      snapshot(next_query);
      next_query += cfg.step;
    }
    short_sk.process(tp.point, tp.t);
    long_sk.process(tp.point, tp.t);
  }
  while (next_query <= objects.back().t) {
    snapshot(next_query);
    next_query += cfg.step;
  }
  return run;
}

struct HumanScore {
  std::size_t human = 0;
  double score = 0.0;
  double first_time = 0.0;
};

/// Sums record scores per human over records whose object feature is within
/// feature_threshold of the query and whose face is within face_threshold of
/// the human's prototype. Ranked by score, ties by earlier first interaction.
inline std::vector<HumanScore> query_top_human(const std::vector<InteractionRecord>& records,
                                               const std::vector<double>& object_query,
                                               const std::vector<std::vector<double>>& human_prototypes,
                                               double feature_threshold, double face_threshold,
                                               BaseMetric metric = BaseMetric::euclidean) {
  std::map<std::size_t, HumanScore> acc;
  for (const auto& r : records) {
    if (block_distance(metric, r.object_feature, object_query) > feature_threshold) continue;
    for (std::size_t h = 0; h < human_prototypes.size(); ++h) {
      if (block_distance(metric, r.human_feature, human_prototypes[h]) > face_threshold) continue;
      auto [it, fresh] = acc.try_emplace(h, HumanScore{h, 0.0, r.time});
      it->second.score += r.score;
      it->second.first_time = std::min(it->second.first_time, r.time);
    }
  }
  std::vector<HumanScore> out;
  for (auto& [_, s] : acc) out.push_back(s);
  std::stable_sort(out.begin(), out.end(), [](const HumanScore& a, const HumanScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.first_time < b.first_time;
  });
  return out;
}

}  // namespace hac::tracker
