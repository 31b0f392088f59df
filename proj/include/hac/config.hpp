#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "hac/error.hpp"
#include "hac/metric.hpp"

namespace hac {

inline constexpr double kInfiniteTimescale = std::numeric_limits<double>::infinity();

/// Parameters of a hop-and-count sketch.
///
/// `f0` is the smallest frequency that can be queried with guarantees.
/// `epsilon` relaxes the acceptance threshold to (1 - epsilon) f, `delta` is
/// the failure probability. Radii are r0 * gamma^k for k in [0, c].
/// `tau` is the decay timescale in the same units as arrival times; infinity
/// weights every point equally.
struct HacConfig {
  double f0 = 0.02;
  double epsilon = 0.5;
  double delta = 0.5;
  double r0 = 1.0;
  double gamma = 2.0;
  int c = 0;
  double tau = kInfiniteTimescale;
  MetricSpec metric;
  std::uint64_t seed = 0;

  friend bool operator==(const HacConfig&, const HacConfig&) = default;
};

inline void validate(const HacConfig& cfg) {
  if (!(cfg.f0 > 0.0 && cfg.f0 <= 1.0)) throw ContractError("f0 must be in (0, 1]");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) throw ContractError("epsilon must be in (0, 1]");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ContractError("delta must be in (0, 1)");
  if (!(cfg.r0 > 0.0) || !std::isfinite(cfg.r0)) throw ContractError("r0 must be a positive finite number");
  if (!(cfg.gamma > 1.0) || !std::isfinite(cfg.gamma)) throw ContractError("gamma must be > 1");
  if (cfg.c < 0) throw ContractError("c must be a non-negative integer");
  if (!(cfg.tau > 0.0)) throw ContractError("tau must be positive (or infinite)");
  if (!std::isfinite(cfg.r0 * std::pow(cfg.gamma, cfg.c))) throw ContractError("c: r0 * gamma^c overflows");
  validate(cfg.metric);
}

/// Number of sample slots: ceil(ln(1 / (f0 delta)) / (f0 epsilon)), at least 1.
inline std::size_t slot_count(const HacConfig& cfg) {
  const double exact = -(std::log(cfg.f0) + std::log(cfg.delta)) / (cfg.f0 * cfg.epsilon);
  // Shave a few ulps so that values that are integers in exact arithmetic
  // (e.g. f0 = 1, delta = 1/e, epsilon = 1) do not round up.
  const double m = std::ceil(exact * (1.0 - 1e-12));
  return m < 1.0 ? 1 : static_cast<std::size_t>(m);
}

/// Radius covered by bucket k.
inline double bucket_radius(const HacConfig& cfg, int k) {
  return cfg.r0 * std::pow(cfg.gamma, k);
}

inline double max_radius(const HacConfig& cfg) { return bucket_radius(cfg, cfg.c); }

/// Smallest k in [0, c] with d <= r0 gamma^k, i.e. max(0, ceil(log_gamma(d / r0))),
/// or -1 when d exceeds r_max.
///
/// The logarithm only seeds the search; the final answer is decided by the
/// same `d <= bucket_radius` comparison the offline checks use, so boundary
/// points never land in a bucket whose radius they exceed.
inline int bucket_index(const HacConfig& cfg, double d) {
  if (d <= cfg.r0) return 0;
  if (d > max_radius(cfg)) return -1;
  int k = static_cast<int>(std::ceil(std::log(d / cfg.r0) / std::log(cfg.gamma)));
  k = std::clamp(k, 0, cfg.c);
  while (k > 0 && d <= bucket_radius(cfg, k - 1)) --k;
  while (k <= cfg.c && d > bucket_radius(cfg, k)) ++k;
  return k <= cfg.c ? k : -1;
}

}  // namespace hac
