#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hac {

/// A feature vector with an optional position block. The label is ground
/// truth carried for evaluation; no algorithm reads it.
struct Point {
  std::vector<double> x;
  std::optional<std::vector<double>> pos;
  std::optional<std::string> label;

  friend bool operator==(const Point&, const Point&) = default;
};

/// A point together with its arrival time.
struct TimedPoint {
  Point point;
  double t = 0.0;
};

/// Stream of timed points in non-decreasing time order.
using Dataset = std::vector<TimedPoint>;

inline bool is_time_ordered(const Dataset& data) {
  for (std::size_t i = 1; i < data.size(); ++i) {
    if (data[i].t < data[i - 1].t) return false;
  }
  return true;
}

}  // namespace hac
