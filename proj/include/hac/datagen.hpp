#pragma once

// Seeded synthetic streams. These are idealized stand-ins for embedding
// data: clusters are isotropic Gaussians and noise is uniform, which is the
// regime the high-dimensional coverage argument assumes, not a model of any
// real embedding network.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hac/error.hpp"
#include "hac/point.hpp"

namespace hac::datagen {

inline const std::string kNoiseLabel = "noise";

// ---- Gaussian mixtures ----------------------------------------------------

/// k isotropic Gaussian clusters plus uniform noise.
///
/// When `means` is empty the cluster means are placed on coordinate axes,
/// mean_i = (separation / sqrt 2) e_i, so every pair of means is exactly
/// `separation` apart (requires k <= dims). A non-positive separation picks
/// 1.3 times the typical intra-cluster point distance sigma sqrt(2 dims).
/// Noise is uniform over the bounding box of the means inflated by 3 sigma.
struct MixtureSpec {
  std::size_t k = 3;
  std::size_t dims = 3;
  std::vector<std::vector<double>> means;
  double separation = 0.0;
  /// One value per cluster, or a single value for all.
  std::vector<double> sigma = {1.0};
  std::vector<double> weights = {0.3, 0.3, 0.3};
  double noise_fraction = 0.1;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  /// Arrival time of point i is t0 + i * dt.
  double t0 = 0.0;
  double dt = 1.0;
};

inline std::string cluster_label(std::size_t i) { return "c" + std::to_string(i); }

inline double cluster_sigma(const MixtureSpec& s, std::size_t i) {
  return s.sigma.size() == 1 ? s.sigma[0] : s.sigma[i];
}

inline void validate(const MixtureSpec& s) {
  if (s.k == 0) throw ContractError("mixture: k must be positive");
  if (s.dims == 0) throw ContractError("mixture: dims must be positive");
  if (s.weights.size() != s.k) throw ContractError("mixture: need one weight per cluster");
  for (double w : s.weights) {
    if (!(w > 0.0)) throw ContractError("mixture: weights must be positive");
  }
  if (!(s.noise_fraction >= 0.0 && s.noise_fraction < 1.0)) {
    throw ContractError("mixture: noise_fraction must be in [0, 1)");
  }
  const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0) + s.noise_fraction;
  if (std::abs(total - 1.0) > 1e-9) {
    throw ContractError("mixture: impossible weights, cluster weights plus noise_fraction sum to " +
                        std::to_string(total) + " instead of 1");
  }
  if (s.sigma.size() != 1 && s.sigma.size() != s.k) {
    throw ContractError("mixture: sigma needs 1 or k entries");
  }
  for (double sg : s.sigma) {
    if (!(sg >= 0.0)) throw ContractError("mixture: sigma must be non-negative");
  }
  if (!s.means.empty()) {
    if (s.means.size() != s.k) throw ContractError("mixture: need one mean per cluster");
    for (const auto& m : s.means) {
      if (m.size() != s.dims) throw ContractError("mixture: mean dimension mismatch");
    }
  } else if (s.k > s.dims) {
    throw ContractError("mixture: sampled means need k <= dims; pass explicit means");
  }
}

inline std::vector<std::vector<double>> mixture_means(const MixtureSpec& s) {
  if (!s.means.empty()) return s.means;
  double sep = s.separation;
  if (!(sep > 0.0)) {
    const double sg = *std::max_element(s.sigma.begin(), s.sigma.end());
    sep = 1.3 * sg * std::sqrt(2.0 * static_cast<double>(s.dims));
  }
  std::vector<std::vector<double>> means(s.k, std::vector<double>(s.dims, 0.0));
  for (std::size_t i = 0; i < s.k; ++i) means[i][i] = sep / std::sqrt(2.0);
  return means;
}

/// n labeled points, labels drawn i.i.d. from (weights, noise_fraction).
inline Dataset gaussian_mixture_stream(const MixtureSpec& s) {
  validate(s);
  const auto means = mixture_means(s);
  std::mt19937_64 rng(s.seed);
  std::vector<double> probs = s.weights;
  probs.push_back(s.noise_fraction);
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
  std::normal_distribution<double> normal(0.0, 1.0);

  const double max_sigma = *std::max_element(s.sigma.begin(), s.sigma.end());
  std::vector<double> lo(s.dims), hi(s.dims);
  for (std::size_t d = 0; d < s.dims; ++d) {
    lo[d] = hi[d] = means[0][d];
    for (const auto& m : means) {
      lo[d] = std::min(lo[d], m[d]);
      hi[d] = std::max(hi[d], m[d]);
    }
    lo[d] -= 3.0 * max_sigma;
    hi[d] += 3.0 * max_sigma;
  }

  Dataset data;
  data.reserve(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    const std::size_t c = pick(rng);
    Point p;
    p.x.resize(s.dims);
    if (c < s.k) {
      const double sg = cluster_sigma(s, c);
      for (std::size_t d = 0; d < s.dims; ++d) p.x[d] = means[c][d] + sg * normal(rng);
      p.label = cluster_label(c);
    } else {
      for (std::size_t d = 0; d < s.dims; ++d) {
        p.x[d] = std::uniform_real_distribution<double>(lo[d], hi[d])(rng);
      }
      p.label = kNoiseLabel;
    }
    data.push_back({std::move(p), s.t0 + static_cast<double>(i) * s.dt});
  }
  return data;
}

/// Face-embedding-like profile in 128 dimensions: one main entity, four
/// cast members, three secondary and 22 minor ones plus poor detections,
/// in the proportions 27 : 4 x 6 : 3 x 4 : 22 x 1 : 25, normalized to 1.
///
/// Geometry: points of one entity are ~0.35 apart, points of different
/// entities ~0.8 apart, so a query radius of 0.5 with duplicate removal at
/// 0.65 separates entities.
inline MixtureSpec character_profile(std::size_t n, std::uint64_t seed) {
  MixtureSpec s;
  s.dims = 128;
  std::vector<double> raw = {0.27, 0.06, 0.06, 0.06, 0.06, 0.04, 0.04, 0.04};
  raw.insert(raw.end(), 22, 0.01);
  const double noise_raw = 0.25;
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0) + noise_raw;
  s.k = raw.size();
  s.weights.clear();
  for (double w : raw) s.weights.push_back(w / total);
  s.noise_fraction = 1.0 - std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  const double intra = 0.35;
  const double inter = 0.8;
  s.sigma = {intra / std::sqrt(2.0 * 128.0)};
  s.separation = std::sqrt(inter * inter - intra * intra);
  s.n = n;
  s.seed = seed;
  return s;
}

// ---- household pick/place streams -------------------------------------------

/// A scripted move: `human` picks `object` from `from_location` at `time`
/// and puts it down at `to_location` carry_seconds later.
struct MoveEvent {
  double time = 0.0;
  int human = 0;
  int object = 0;
  int from_location = 0;
  int to_location = 0;
};

struct TruthEvent {
  double t = 0.0;
  int human = 0;
  int object = 0;
  bool pick = true;  // false: place

  friend bool operator==(const TruthEvent&, const TruthEvent&) = default;
};

/// Tables with camera ids 0..T-1; each has a row of object locations.
/// Position blocks are [camera, x, y] in meters. The recording is split into
/// steps: actions happen in the first `action_seconds` of a step, the rest
/// is quiet.
struct HouseholdSpec {
  int num_objects = 10;
  int num_humans = 8;
  std::vector<int> locations_per_table = {8, 4, 4, 4};
  /// Initial location of each object; empty means object i at location i.
  std::vector<int> initial_locations;
  std::vector<MoveEvent> schedule;
  int steps = 60;
  double step_seconds = 20.0;
  double action_seconds = 10.0;
  double carry_seconds = 8.0;
  double frame_seconds = 1.0;
  /// Expected spurious object detections per second (Poisson per frame).
  double noise_rate = 4.0;
  /// Immovable items per table, detected every frame.
  int stable_per_table = 1;
  int feature_dims = 16;
  int face_dims = 16;
  double feature_noise_sigma = 0.05;
  double position_noise_sigma = 0.02;
  double face_noise_sigma = 0.05;
  double location_spacing = 0.5;
  double table_spacing = 5.0;
  /// Independent miss per (human, step).
  double face_miss_rate = 0.5;
  /// Probability that a human without an action in a step walks past a
  /// random table during that step's action phase, staying bystander_seconds.
  double bystander_rate = 0.05;
  double bystander_seconds = 3.0;
  /// Pairs of humans whose face prototypes nearly coincide.
  std::vector<std::pair<int, int>> twin_pairs;
  double twin_distance = 0.2;
  std::uint64_t seed = 0;
};

struct HouseholdStreams {
  Dataset objects;
  Dataset faces;
  std::vector<TruthEvent> truth;
  std::vector<std::vector<double>> object_prototypes;
  std::vector<std::vector<double>> human_prototypes;
};

inline int num_locations(const HouseholdSpec& s) {
  return std::accumulate(s.locations_per_table.begin(), s.locations_per_table.end(), 0);
}

inline int table_of_location(const HouseholdSpec& s, int loc) {
  int t = 0;
  for (int n : s.locations_per_table) {
    if (loc < n) return t;
    loc -= n;
    ++t;
  }
  throw ContractError("location " + std::to_string(loc) + " out of range");
}

/// [camera, x, y] of a location spot.
inline std::vector<double> location_position(const HouseholdSpec& s, int loc) {
  int t = 0, idx = loc;
  for (int n : s.locations_per_table) {
    if (idx < n) break;
    idx -= n;
    ++t;
  }
  return {static_cast<double>(t), t * s.table_spacing + idx * s.location_spacing, 0.0};
}

/// Script used by the default scenario: `moves` moves over the recording,
/// every object except the last `untouched` gets at least `min_moves`, and
/// each touched object has a primary human who performs
/// max(ceil(primary_share * count), count / 2 + 1) of its moves, so the
/// most frequent human of every touched object is unambiguous.
inline std::vector<MoveEvent> generate_schedule(const HouseholdSpec& s, int moves, int untouched,
                                                int min_moves, double primary_share,
                                                std::uint64_t seed) {
  const int touched = s.num_objects - untouched;
  if (touched <= 0 || moves < touched * min_moves) {
    throw ContractError("schedule: not enough moves for the requested minimum per object");
  }
  if (s.num_humans < 2) throw ContractError("schedule: need at least two humans");
  std::mt19937_64 rng(seed);
  std::vector<int> count(static_cast<std::size_t>(touched), min_moves);
  for (int extra = moves - touched * min_moves; extra > 0; --extra) {
    ++count[std::uniform_int_distribution<int>(0, touched - 1)(rng)];
  }
  std::vector<int> humans(static_cast<std::size_t>(s.num_humans));
  std::iota(humans.begin(), humans.end(), 0);
  std::shuffle(humans.begin(), humans.end(), rng);

  struct Pending {
    int object;
    int human;
  };
  std::vector<Pending> pending;
  std::uniform_int_distribution<int> other(0, s.num_humans - 2);
  for (int o = 0; o < touched; ++o) {
    const int primary = humans[o % s.num_humans];
    const int own = std::max(static_cast<int>(std::ceil(primary_share * count[o])), count[o] / 2 + 1);
    for (int j = 0; j < count[o]; ++j) {
      int h = primary;
      if (j >= own) {
        h = other(rng);
        if (h >= primary) ++h;
      }
      pending.push_back({o, h});
    }
  }
  std::shuffle(pending.begin(), pending.end(), rng);

  std::vector<int> where(static_cast<std::size_t>(s.num_objects));
  for (int o = 0; o < s.num_objects; ++o) {
    where[o] = s.initial_locations.empty() ? o : s.initial_locations[o];
  }
  const int nloc = num_locations(s);
  // Spread the moves over steps after the first, at most one move per object
  // and per human in a step.
  const int per_step = (moves + s.steps - 2) / (s.steps - 1);
  std::vector<MoveEvent> out;
  std::size_t next = 0;
  for (int step = 1; step < s.steps && next < pending.size(); ++step) {
    std::vector<bool> human_busy(static_cast<std::size_t>(s.num_humans), false);
    std::vector<bool> object_busy(static_cast<std::size_t>(s.num_objects), false);
    std::vector<bool> target_taken(static_cast<std::size_t>(nloc), false);
    const int remaining_steps = s.steps - step;
    const int todo = static_cast<int>(pending.size() - next);
    const int here = std::min(per_step, (todo + remaining_steps - 1) / remaining_steps + 1);
    for (int j = 0; j < here && next < pending.size(); ++j) {
      const auto [o, h] = pending[next];
      if (object_busy[o] || human_busy[h]) break;
      std::vector<int> free_locs;
      for (int l = 0; l < nloc; ++l) {
        const bool occupied = std::find(where.begin(), where.end(), l) != where.end();
        if (!occupied && !target_taken[l]) free_locs.push_back(l);
      }
      if (free_locs.empty()) break;
      const int to = free_locs[std::uniform_int_distribution<std::size_t>(0, free_locs.size() - 1)(rng)];
      const double start = step * s.step_seconds;
      const double t = start + std::uniform_real_distribution<double>(0.5, 2.0)(rng);
      out.push_back({t, h, o, where[o], to});
      human_busy[h] = object_busy[o] = true;
      // Neither end of a move is available to other moves of the same step.
      target_taken[to] = target_taken[where[o]] = true;
      where[o] = to;
      ++next;
    }
  }
  if (next < pending.size()) throw ContractError("schedule: could not fit all moves into the recording");
  std::sort(out.begin(), out.end(), [](const MoveEvent& a, const MoveEvent& b) { return a.time < b.time; });
  return out;
}

/// The default 8-human, 10-object scenario: 48 moves (96 pick/place
/// events), object 9 untouched, every other object moved at least 4 times.
inline HouseholdSpec default_household(std::uint64_t seed) {
  HouseholdSpec s;
  s.seed = seed;
  s.schedule = generate_schedule(s, 48, 1, 4, 0.8, seed ^ 0x5eed5eedULL);
  return s;
}

/// Checks the schedule against object locations, returning ground truth.
inline std::vector<TruthEvent> check_schedule(const HouseholdSpec& s) {
  const int nloc = num_locations(s);
  std::vector<int> where(static_cast<std::size_t>(s.num_objects));
  for (int o = 0; o < s.num_objects; ++o) {
    where[o] = s.initial_locations.empty() ? o : s.initial_locations[o];
    if (where[o] < 0 || where[o] >= nloc) throw ContractError("initial location out of range");
  }
  std::vector<TruthEvent> truth;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    const auto& e = s.schedule[i];
    const std::string which = "schedule event " + std::to_string(i) + " (t=" + std::to_string(e.time) + ")";
    if (e.time < prev) throw ContractError(which + ": times must be non-decreasing");
    prev = e.time;
    if (e.object < 0 || e.object >= s.num_objects) throw ContractError(which + ": bad object");
    if (e.human < 0 || e.human >= s.num_humans) throw ContractError(which + ": bad human");
    if (e.to_location < 0 || e.to_location >= nloc) throw ContractError(which + ": bad destination");
    if (where[e.object] != e.from_location) {
      throw ContractError(which + ": object " + std::to_string(e.object) + " is not at location " +
                          std::to_string(e.from_location));
    }
    for (int o = 0; o < s.num_objects; ++o) {
      if (o != e.object && where[o] == e.to_location) {
        throw ContractError(which + ": destination " + std::to_string(e.to_location) + " is occupied");
      }
    }
    where[e.object] = e.to_location;
    truth.push_back({e.time, e.human, e.object, true});
    truth.push_back({e.time + s.carry_seconds, e.human, e.object, false});
  }
  std::stable_sort(truth.begin(), truth.end(),
                   [](const TruthEvent& a, const TruthEvent& b) { return a.t < b.t; });
  return truth;
}

inline HouseholdStreams household_stream(const HouseholdSpec& s) {
  if (s.num_objects <= 0 || s.num_humans <= 0) throw ContractError("household: need objects and humans");
  if (num_locations(s) < s.num_objects) throw ContractError("household: more objects than locations");
  if (!(s.frame_seconds > 0.0) || !(s.step_seconds > 0.0)) {
    throw ContractError("household: frame_seconds and step_seconds must be positive");
  }
  HouseholdStreams out;
  out.truth = check_schedule(s);

  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_vector = [&](int dims) {
    std::vector<double> v(static_cast<std::size_t>(dims));
    for (auto& x : v) x = normal(rng);
    return v;
  };
  for (int o = 0; o < s.num_objects; ++o) out.object_prototypes.push_back(random_vector(s.feature_dims));
  for (int h = 0; h < s.num_humans; ++h) out.human_prototypes.push_back(random_vector(s.face_dims));
  for (auto [a, b] : s.twin_pairs) {
    auto v = random_vector(s.face_dims);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (int d = 0; d < s.face_dims; ++d) {
      out.human_prototypes[b][d] = out.human_prototypes[a][d] + s.twin_distance * v[d] / norm;
    }
  }
  const int tables = static_cast<int>(s.locations_per_table.size());
  std::vector<std::vector<double>> stable_proto;
  std::vector<std::vector<double>> stable_pos;
  for (int t = 0; t < tables; ++t) {
    for (int j = 0; j < s.stable_per_table; ++j) {
      stable_proto.push_back(random_vector(s.feature_dims));
      stable_pos.push_back({static_cast<double>(t), t * s.table_spacing + j * s.location_spacing, 1.0});
    }
  }

  // Per-step presence: who stands at which camera, and when.
  struct Presence {
    int human;
    int camera;
    double from, to;
  };
  std::vector<Presence> presence;
  std::vector<std::vector<bool>> seen(static_cast<std::size_t>(s.steps),
                                      std::vector<bool>(static_cast<std::size_t>(s.num_humans)));
  std::bernoulli_distribution detected(1.0 - s.face_miss_rate);
  std::bernoulli_distribution bystands(s.bystander_rate);
  for (int step = 0; step < s.steps; ++step) {
    const double start = step * s.step_seconds;
    const double end_action = start + s.action_seconds;
    std::vector<bool> acting(static_cast<std::size_t>(s.num_humans), false);
    for (const auto& e : s.schedule) {
      if (e.time < start || e.time >= start + s.step_seconds) continue;
      acting[e.human] = true;
      const double place = e.time + s.carry_seconds;
      const double mid = 0.5 * (e.time + place);
      presence.push_back({e.human, table_of_location(s, e.from_location), start, mid});
      presence.push_back({e.human, table_of_location(s, e.to_location), mid, std::max(end_action, place + 1.0)});
    }
    for (int h = 0; h < s.num_humans; ++h) {
      seen[step][h] = detected(rng);
      if (!acting[h] && bystands(rng)) {
        const int cam = std::uniform_int_distribution<int>(0, tables - 1)(rng);
        const double from = start + std::uniform_real_distribution<double>(
                                        0.0, std::max(0.0, s.action_seconds - s.bystander_seconds))(rng);
        presence.push_back({h, cam, from, from + s.bystander_seconds});
      }
    }
  }

  // Object location timeline from the schedule.
  std::vector<int> where(static_cast<std::size_t>(s.num_objects));
  for (int o = 0; o < s.num_objects; ++o) where[o] = s.initial_locations.empty() ? o : s.initial_locations[o];
  std::vector<bool> carried(static_cast<std::size_t>(s.num_objects), false);
  std::size_t next_truth = 0;
  // Moves carry the destination; index them by object and pick time.
  std::vector<std::size_t> move_of_pick;
  for (std::size_t i = 0; i < s.schedule.size(); ++i) move_of_pick.push_back(i);

  const double duration = s.steps * s.step_seconds;
  const auto frames = static_cast<long>(std::floor(duration / s.frame_seconds));
  std::poisson_distribution<int> noise_count(s.noise_rate * s.frame_seconds);
  std::uniform_int_distribution<int> any_table(0, tables - 1);
  std::vector<TimedPoint> frame_points;
  for (long f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) * s.frame_seconds;
    // Apply every pick/place up to this frame.
    while (next_truth < out.truth.size() && out.truth[next_truth].t <= t) {
      const auto& ev = out.truth[next_truth];
      if (ev.pick) {
        carried[ev.object] = true;
      } else {
        carried[ev.object] = false;
        for (const auto& m : s.schedule) {
          if (m.object == ev.object && std::abs(m.time + s.carry_seconds - ev.t) < 1e-12) {
            where[ev.object] = m.to_location;
          }
        }
      }
      ++next_truth;
    }
    frame_points.clear();
    for (int o = 0; o < s.num_objects; ++o) {
      if (carried[o]) continue;
      Point p;
      p.x = out.object_prototypes[o];
      for (auto& x : p.x) x += s.feature_noise_sigma * normal(rng);
      auto pos = location_position(s, where[o]);
      pos[1] += s.position_noise_sigma * normal(rng);
      pos[2] += s.position_noise_sigma * normal(rng);
      p.pos = pos;
      p.label = "o" + std::to_string(o);
      frame_points.push_back({std::move(p), t});
    }
    for (std::size_t j = 0; j < stable_proto.size(); ++j) {
      Point p;
      p.x = stable_proto[j];
      for (auto& x : p.x) x += s.feature_noise_sigma * normal(rng);
      auto pos = stable_pos[j];
      pos[1] += s.position_noise_sigma * normal(rng);
      pos[2] += s.position_noise_sigma * normal(rng);
      p.pos = pos;
      p.label = "stable" + std::to_string(j);
      frame_points.push_back({std::move(p), t});
    }
    for (int j = noise_count(rng); j > 0; --j) {
      Point p;
      p.x = random_vector(s.feature_dims);
      const int cam = any_table(rng);
      const int nloc_t = s.locations_per_table[cam];
      p.pos = std::vector<double>{
          static_cast<double>(cam),
          cam * s.table_spacing + std::uniform_real_distribution<double>(-0.5, nloc_t * s.location_spacing)(rng),
          std::uniform_real_distribution<double>(-0.5, 1.5)(rng)};
      p.label = kNoiseLabel;
      frame_points.push_back({std::move(p), t});
    }
    std::shuffle(frame_points.begin(), frame_points.end(), rng);
    for (auto& tp : frame_points) out.objects.push_back(std::move(tp));

    const int step = static_cast<int>(t / s.step_seconds);
    for (const auto& pr : presence) {
      if (t < pr.from || t >= pr.to) continue;
      if (step >= s.steps || !seen[step][pr.human]) continue;
      Point p;
      p.x = out.human_prototypes[pr.human];
      for (auto& x : p.x) x += s.face_noise_sigma * normal(rng);
      p.pos = std::vector<double>{static_cast<double>(pr.camera)};
      p.label = "h" + std::to_string(pr.human);
      out.faces.push_back({std::move(p), t});
    }
  }
  return out;
}

}  // namespace hac::datagen
