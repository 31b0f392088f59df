#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "hac/config.hpp"
#include "hac/error.hpp"
#include "hac/metric.hpp"
#include "hac/output.hpp"
#include "hac/point.hpp"
#include "hac/postprocess.hpp"

namespace hac {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform draw in [0, 1) for the hop decision of `slot` at the
/// `arrival`-th point. Counter based: every slot owns an independent stream
/// keyed by (seed, global slot id), so any subset of slots replays exactly
/// the decisions it would make inside the full sketch.
inline double hop_uniform(std::uint64_t seed, std::uint64_t slot, std::uint64_t arrival) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ (slot * 0xd1b54a32d192ed03ULL));
  const std::uint64_t bits = splitmix64(key ^ splitmix64(arrival));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// One reservoir sample: the held point, when it was adopted, and weighted
/// counts of later points per radius bucket. Counters are stored as of
/// `last_decay_time` and decayed lazily.
struct SampleSlot {
  std::optional<Point> held;
  double hop_time = 0.0;
  std::vector<double> counters;
  double last_decay_time = 0.0;

  friend bool operator==(const SampleSlot&, const SampleSlot&) = default;
};

/// Half-open range of global slot ids.
struct SlotRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits [0, m) into `parts` contiguous ranges of near-equal size.
inline std::vector<SlotRange> partition_slots(std::size_t m, std::size_t parts) {
  if (parts == 0) throw ContractError("partition_slots: parts must be positive");
  std::vector<SlotRange> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    const std::size_t end = m * (i + 1) / parts;
    out.push_back({begin, end});
    begin = end;
  }
  return out;
}

/// Full serializable state of a sketch (or of a slot partition of one).
struct SketchState {
  HacConfig config;
  std::size_t slot_offset = 0;
  std::vector<SampleSlot> slots;
  std::uint64_t t_count = 0;
  double total_weight = 0.0;
  double last_arrival_time = 0.0;

  friend bool operator==(const SketchState&, const SketchState&) = default;
};

/// Hop-and-count sketch over an arbitrary distance.
///
/// Keeps m independent sample slots. On every arrival each slot hops to the
/// new point with probability 1 / W (W being the decayed total weight, which
/// is the point count when tau is infinite) and resets its counters; then
/// it adds the point's unit weight to the bucket of the smallest radius
/// r0 gamma^k that contains it. A slot that just hopped counts the point
/// itself in bucket 0.
///
/// Memory is m * (c + 1) counters plus m held points, independent of the
/// stream length. process() has a single writer; queries are const and may
/// run concurrently with each other but not with process().
template <class Distance = Metric>
class Sketch {
 public:
  explicit Sketch(const HacConfig& cfg)
    requires std::is_constructible_v<Distance, MetricSpec>
      : Sketch(cfg, Distance(cfg.metric)) {}

  Sketch(const HacConfig& cfg, Distance dist)
      : Sketch(cfg, SlotRange{0, slot_count_checked(cfg)}, std::move(dist)) {}

  /// A sketch owning only the slots in `range` of the full m-slot sketch.
  /// Feeding every partition the whole stream reproduces the full sketch's
  /// per-slot state exactly.
  Sketch(const HacConfig& cfg, SlotRange range, Distance dist)
      : cfg_(cfg), dist_(std::move(dist)), slot_offset_(range.begin) {
    const std::size_t m = slot_count_checked(cfg_);
    if (range.begin > range.end || range.end > m) {
      throw ContractError("slot range out of bounds");
    }
    slots_.resize(range.end - range.begin);
    for (auto& s : slots_) s.counters.assign(static_cast<std::size_t>(cfg_.c) + 1, 0.0);
  }

  static Sketch from_state(SketchState state, Distance dist) {
    validate(state.config);
    const std::size_t m = slot_count(state.config);
    if (state.slot_offset + state.slots.size() > m) {
      throw FormatError("sketch state holds more slots than its config allows");
    }
    for (const auto& s : state.slots) {
      if (s.counters.size() != static_cast<std::size_t>(state.config.c) + 1) {
        throw FormatError("sketch state has a slot with the wrong number of counters");
      }
    }
    Sketch sk(state.config, SlotRange{state.slot_offset, state.slot_offset}, std::move(dist));
    sk.slots_ = std::move(state.slots);
    sk.t_count_ = state.t_count;
    sk.total_weight_ = state.total_weight;
    sk.last_arrival_ = state.last_arrival_time;
    return sk;
  }

  static Sketch from_state(SketchState state)
    requires std::is_constructible_v<Distance, MetricSpec>
  {
    Distance d(state.config.metric);
    return from_state(std::move(state), std::move(d));
  }

  SketchState state() const {
    return {cfg_, slot_offset_, slots_, t_count_, total_weight_, last_arrival_};
  }

  const HacConfig& config() const { return cfg_; }
  const Distance& distance() const { return dist_; }
  std::span<const SampleSlot> slots() const { return slots_; }
  std::size_t slot_offset() const { return slot_offset_; }
  /// m of the full sketch, independent of partitioning.
  std::size_t total_slots() const { return slot_count(cfg_); }
  std::size_t bucket_count() const { return static_cast<std::size_t>(cfg_.c) + 1; }
  std::size_t memory_cells() const {
    std::size_t cells = 0;
    for (const auto& s : slots_) cells += s.counters.size();
    return cells;
  }
  std::uint64_t t_count() const { return t_count_; }
  double total_weight() const { return total_weight_; }
  double last_arrival_time() const { return last_arrival_; }

  /// Decayed total weight as seen at `time` (>= last arrival).
  double total_weight_at(double time) const {
    if (t_count_ == 0) return 0.0;
    return total_weight_ * decay(time - last_arrival_);
  }

  /// Probability with which every slot hops to a point arriving at `time`.
  double hop_probability(double arrival_time) const {
    check_time(arrival_time);
    if (t_count_ == 0) return 1.0;
    return 1.0 / (total_weight_at(arrival_time) + 1.0);
  }

  void process(const Point& point, double arrival_time) {
    check_time(arrival_time);
    total_weight_ = t_count_ == 0 ? 1.0 : total_weight_at(arrival_time) + 1.0;
    ++t_count_;
    last_arrival_ = arrival_time;
    const double p = 1.0 / total_weight_;

    for (std::size_t i = 0; i < slots_.size(); ++i) {
      SampleSlot& s = slots_[i];
      if (detail::hop_uniform(cfg_.seed, slot_offset_ + i, t_count_) < p) {
        s.held = point;
        s.hop_time = arrival_time;
        std::fill(s.counters.begin(), s.counters.end(), 0.0);
        s.counters[0] = 1.0;
        s.last_decay_time = arrival_time;
        continue;
      }
      if (!s.held) continue;
      const int k = bucket_index(cfg_, dist_(*s.held, point));
      if (k < 0) continue;
      bring_to(s, arrival_time);
      s.counters[static_cast<std::size_t>(k)] += 1.0;
    }
  }

  /// All slots dense at frequency f: per slot, the smallest bucket whose
  /// cumulative decayed count reaches (1 - epsilon) f W(query_time).
  QueryResult query_dense(double f, double query_time) const {
    check_query(f, query_time);
    QueryResult res{query_time, QueryOrder::by_slot, kNoLimit, {}};
    if (t_count_ == 0 || static_cast<double>(t_count_) * f < 1.0) return res;
    const double w = total_weight_at(query_time);
    const double threshold = (1.0 - cfg_.epsilon) * f * w;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      const SampleSlot& s = slots_[i];
      if (!s.held) continue;
      const double fac = decay(query_time - s.last_decay_time);
      double cum = 0.0;
      for (int k = 0; k <= cfg_.c; ++k) {
        cum += s.counters[static_cast<std::size_t>(k)] * fac;
        if (cum >= threshold) {
          res.outputs.push_back(make_output(i, k, cum / w));
          break;
        }
      }
    }
    return res;
  }

  /// One candidate per held slot, scored by its cumulative frequency up to
  /// `radius_index`, densest first. Dedup (if any) runs on the full
  /// candidate list before truncation to k.
  QueryResult query_top_k_by_frequency(int radius_index, std::size_t k, double query_time,
                                       const DedupPolicy& dedup = {}) const {
    if (radius_index < 0 || radius_index > cfg_.c) {
      throw ContractError("radius_index must be in [0, c]");
    }
    if (k == 0) throw ContractError("k must be positive");
    check_query_time(query_time);
    QueryResult res{query_time, QueryOrder::by_frequency, k, {}};
    if (t_count_ == 0) return res;
    const double w = total_weight_at(query_time);
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      const SampleSlot& s = slots_[i];
      if (!s.held) continue;
      const double fac = decay(query_time - s.last_decay_time);
      double cum = 0.0;
      for (int b = 0; b <= radius_index; ++b) cum += s.counters[static_cast<std::size_t>(b)] * fac;
      res.outputs.push_back(make_output(i, radius_index, cum / w));
    }
    finish(res, dedup);
    return res;
  }

  /// Dense outputs at frequency f ordered from the smallest radius up.
  QueryResult query_top_k_by_radius(double f, std::size_t k, double query_time,
                                    const DedupPolicy& dedup = {}) const {
    if (k == 0) throw ContractError("k must be positive");
    QueryResult res = query_dense(f, query_time);
    res.order = QueryOrder::by_radius;
    res.limit = k;
    finish(res, dedup);
    return res;
  }

 private:
  static std::size_t slot_count_checked(const HacConfig& cfg) {
    validate(cfg);
    return slot_count(cfg);
  }

  double decay(double dt) const {
    if (cfg_.tau == kInfiniteTimescale || dt == 0.0) return 1.0;
    return std::exp(-dt / cfg_.tau);
  }

  void bring_to(SampleSlot& s, double time) const {
    if (s.last_decay_time == time) return;
    const double fac = decay(time - s.last_decay_time);
    if (fac != 1.0) {
      for (auto& c : s.counters) c *= fac;
    }
    s.last_decay_time = time;
  }

  void check_time(double t) const {
    if (t_count_ > 0 && t < last_arrival_) {
      throw ContractError("arrival times must be non-decreasing (got " + std::to_string(t) +
                          " after " + std::to_string(last_arrival_) + ")");
    }
  }

  void check_query_time(double t) const {
    if (t_count_ > 0 && t < last_arrival_) {
      throw ContractError("query_time precedes the last arrival");
    }
  }

  void check_query(double f, double query_time) const {
    if (!(f >= cfg_.f0)) {
      throw ContractError("query frequency " + std::to_string(f) +
                          " is below f0 = " + std::to_string(cfg_.f0) +
                          "; the coverage guarantee only holds for f >= f0");
    }
    if (!(f <= 1.0)) throw ContractError("query frequency must be <= 1");
    check_query_time(query_time);
  }

  Output make_output(std::size_t local, int k, double freq) const {
    const SampleSlot& s = slots_[local];
    return Output{*s.held, k, bucket_radius(cfg_, k), freq, slot_offset_ + local, s.hop_time};
  }

  void finish(QueryResult& res, const DedupPolicy& dedup) const {
    auto before = [order = res.order](const Output& a, const Output& b) {
      return output_before(order, a, b);
    };
    std::stable_sort(res.outputs.begin(), res.outputs.end(), before);
    if (dedup.variant != DedupVariant::none) {
      res.outputs = apply_dedup(std::move(res.outputs), dedup, dist_);
      std::stable_sort(res.outputs.begin(), res.outputs.end(), before);
    }
    if (res.outputs.size() > res.limit) res.outputs.resize(res.limit);
  }

  HacConfig cfg_;
  Distance dist_;
  std::size_t slot_offset_ = 0;
  std::vector<SampleSlot> slots_;
  std::uint64_t t_count_ = 0;
  double total_weight_ = 0.0;
  double last_arrival_ = 0.0;
};

/// Combines query results computed on disjoint slot partitions of sketches
/// fed the same stream. Undeduplicated partial results merge to exactly the
/// whole-sketch result.
inline QueryResult merge_outputs(std::span<const QueryResult> parts) {
  QueryResult merged;
  if (parts.empty()) return merged;
  merged.query_time = parts.front().query_time;
  merged.order = parts.front().order;
  merged.limit = parts.front().limit;
  for (const auto& p : parts) {
    if (p.query_time != merged.query_time) {
      throw ContractError("merge_outputs: parts were queried at different times");
    }
    if (p.order != merged.order) throw ContractError("merge_outputs: parts use different orders");
    merged.limit = std::min(merged.limit, p.limit);
    merged.outputs.insert(merged.outputs.end(), p.outputs.begin(), p.outputs.end());
  }
  std::stable_sort(merged.outputs.begin(), merged.outputs.end(),
                   [order = merged.order](const Output& a, const Output& b) {
                     return output_before(order, a, b);
                   });
  if (merged.outputs.size() > merged.limit) merged.outputs.resize(merged.limit);
  return merged;
}

}  // namespace hac
