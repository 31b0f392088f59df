#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "hac/point.hpp"

namespace hac {

/// A dense-region representative reported by a sketch query.
struct Output {
  Point point;
  int radius_index = 0;
  double radius = 0.0;
  /// Cumulative (decayed) count up to radius_index over the total weight.
  double freq_estimate = 0.0;
  std::size_t slot_id = 0;
  double hop_time = 0.0;

  friend bool operator==(const Output&, const Output&) = default;
};

enum class QueryOrder {
  /// One output per qualifying slot, in slot order.
  by_slot,
  /// Decreasing freq_estimate, then earlier hop, then slot id.
  by_frequency,
  /// Increasing radius_index, then decreasing freq_estimate, then slot id.
  by_radius,
};

inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

/// Outputs of one query together with what is needed to merge partial
/// results computed on disjoint slot ranges.
struct QueryResult {
  double query_time = 0.0;
  QueryOrder order = QueryOrder::by_slot;
  std::size_t limit = kNoLimit;
  std::vector<Output> outputs;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

inline bool output_before(QueryOrder order, const Output& a, const Output& b) {
  switch (order) {
    case QueryOrder::by_slot:
      return a.slot_id < b.slot_id;
    case QueryOrder::by_frequency:
      if (a.freq_estimate != b.freq_estimate) return a.freq_estimate > b.freq_estimate;
      if (a.hop_time != b.hop_time) return a.hop_time < b.hop_time;
      return a.slot_id < b.slot_id;
    case QueryOrder::by_radius:
      if (a.radius_index != b.radius_index) return a.radius_index < b.radius_index;
      if (a.freq_estimate != b.freq_estimate) return a.freq_estimate > b.freq_estimate;
      return a.slot_id < b.slot_id;
  }
  return false;
}

}  // namespace hac
