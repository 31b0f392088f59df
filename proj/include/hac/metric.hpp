#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "hac/error.hpp"
#include "hac/point.hpp"

namespace hac {

/// Distance on a single vector block.
enum class BaseMetric {
  euclidean,
  /// arccos(cosine similarity) / pi, in [0, 1]. A true metric.
  angular,
  /// 1 - cosine similarity. Violates the triangle inequality, so the
  /// coverage guarantees do not apply; only usable with allow_non_metric.
  cosine,
};

enum class MetricKind { euclidean, angular, cosine, composite };

/// Runtime description of the distance used by a sketch.
///
/// For `composite`, the distance of two points is
///   max(d_position(pos_a, pos_b) / position_scale, d_feature(x_a, x_b) / feature_scale)
/// and both points must carry a position block. The scales have no default
/// that could be inferred from data, so they must always be set explicitly.
struct MetricSpec {
  MetricKind kind = MetricKind::euclidean;
  BaseMetric feature = BaseMetric::euclidean;
  BaseMetric position = BaseMetric::euclidean;
  double feature_scale = 1.0;
  double position_scale = 1.0;
  bool allow_non_metric = false;

  static MetricSpec euclidean() { return {}; }
  static MetricSpec angular() { return {.kind = MetricKind::angular}; }
  static MetricSpec composite(BaseMetric feature, BaseMetric position,
                              double feature_scale, double position_scale) {
    return {.kind = MetricKind::composite,
            .feature = feature,
            .position = position,
            .feature_scale = feature_scale,
            .position_scale = position_scale};
  }

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

inline std::string_view to_string(BaseMetric m) {
  switch (m) {
    case BaseMetric::euclidean: return "euclidean";
    case BaseMetric::angular: return "angular";
    case BaseMetric::cosine: return "cosine";
  }
  return "?";
}

inline std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::angular: return "angular";
    case MetricKind::cosine: return "cosine";
    case MetricKind::composite: return "composite";
  }
  return "?";
}

inline BaseMetric base_metric_from_string(std::string_view s) {
  if (s == "euclidean") return BaseMetric::euclidean;
  if (s == "angular") return BaseMetric::angular;
  if (s == "cosine") return BaseMetric::cosine;
  throw ContractError("unknown base metric '" + std::string(s) + "'");
}

inline MetricKind metric_kind_from_string(std::string_view s) {
  if (s == "euclidean") return MetricKind::euclidean;
  if (s == "angular") return MetricKind::angular;
  if (s == "cosine") return MetricKind::cosine;
  if (s == "composite") return MetricKind::composite;
  throw ContractError("unknown metric kind '" + std::string(s) + "'");
}

inline void validate(const MetricSpec& spec) {
  const bool uses_cosine =
      spec.kind == MetricKind::cosine ||
      (spec.kind == MetricKind::composite &&
       (spec.feature == BaseMetric::cosine || spec.position == BaseMetric::cosine));
  if (uses_cosine && !spec.allow_non_metric) {
    throw ContractError(
        "metric: raw cosine distance is not a metric; use 'angular' or set allow_non_metric");
  }
  if (spec.kind == MetricKind::composite) {
    if (!(spec.feature_scale > 0.0) || !std::isfinite(spec.feature_scale)) {
      throw ContractError("metric.feature_scale must be a positive finite number");
    }
    if (!(spec.position_scale > 0.0) || !std::isfinite(spec.position_scale)) {
      throw ContractError("metric.position_scale must be a positive finite number");
    }
  }
}

namespace detail {

inline void check_dims(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw ContractError("angular/cosine distance is undefined for a zero-norm vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace detail

inline double block_distance(BaseMetric m, std::span<const double> a, std::span<const double> b) {
  detail::check_dims(a, b);
  switch (m) {
    case BaseMetric::euclidean:
      return detail::euclidean(a, b);
    case BaseMetric::angular: {
      // Identical directions can come out as 1 - ulp; pin them to zero so
      // d(a, a) == 0 holds exactly.
      if (std::equal(a.begin(), a.end(), b.begin(), b.end())) {
        (void)detail::cosine_similarity(a, b);
        return 0.0;
      }
      return std::acos(detail::cosine_similarity(a, b)) / std::numbers::pi;
    }
    case BaseMetric::cosine: {
      if (std::equal(a.begin(), a.end(), b.begin(), b.end())) {
        (void)detail::cosine_similarity(a, b);
        return 0.0;
      }
      return std::max(0.0, 1.0 - detail::cosine_similarity(a, b));
    }
  }
  return 0.0;
}

/// max(d_position / position_scale, d_feature / feature_scale).
inline double composite_max_distance(const Point& a, const Point& b, BaseMetric feature,
                                     BaseMetric position, double feature_scale,
                                     double position_scale) {
  if (!a.pos || !b.pos) {
    throw ContractError("composite metric requires both points to carry a position block");
  }
  const double dp = block_distance(position, *a.pos, *b.pos) / position_scale;
  const double df = block_distance(feature, a.x, b.x) / feature_scale;
  return std::max(dp, df);
}

inline double distance(const MetricSpec& spec, const Point& a, const Point& b) {
  switch (spec.kind) {
    case MetricKind::euclidean: return block_distance(BaseMetric::euclidean, a.x, b.x);
    case MetricKind::angular: return block_distance(BaseMetric::angular, a.x, b.x);
    case MetricKind::cosine: return block_distance(BaseMetric::cosine, a.x, b.x);
    case MetricKind::composite:
      return composite_max_distance(a, b, spec.feature, spec.position, spec.feature_scale,
                                    spec.position_scale);
  }
  return 0.0;
}

/// Callable wrapper so a MetricSpec can be used wherever a distance functor
/// is expected.
class Metric {
 public:
  Metric() = default;
  explicit Metric(MetricSpec spec) : spec_(spec) { validate(spec_); }

  double operator()(const Point& a, const Point& b) const { return distance(spec_, a, b); }
  const MetricSpec& spec() const { return spec_; }

 private:
  MetricSpec spec_;
};

}  // namespace hac
