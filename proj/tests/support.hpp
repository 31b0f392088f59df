#pragma once

// Shared fixtures and independent reference computations for the unit tests.
// Nothing here calls into the code under test except the hop draw, which
// both sides must share to be comparable.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hac/hac.hpp"

namespace hac::testing {

inline Point pt(std::vector<double> x) { return Point{std::move(x), std::nullopt, std::nullopt}; }

inline Point pt_at(std::vector<double> x, std::vector<double> pos) {
  return Point{std::move(x), std::move(pos), std::nullopt};
}

/// 1-d points at the given coordinates, arriving at t = 0, 1, 2, ...
inline Dataset line(const std::vector<double>& xs) {
  Dataset d;
  for (std::size_t i = 0; i < xs.size(); ++i) d.push_back({pt({xs[i]}), static_cast<double>(i)});
  return d;
}

/// Small random generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  std::vector<double> vec(std::size_t dims, double scale = 1.0) {
    std::vector<double> v(dims);
    for (auto& x : v) x = scale * normal();
    return v;
  }

  /// Clustered stream with random gaps (ties included) between arrivals.
  Dataset stream(std::size_t n, std::size_t dims, bool ties = true) {
    const std::size_t k = 1 + index(4);
    std::vector<std::vector<double>> centers;
    for (std::size_t i = 0; i < k; ++i) centers.push_back(vec(dims, 3.0));
    Dataset d;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = centers[index(k)];
      const double s = uniform(0.0, 1.0) < 0.2 ? 2.0 : 0.2;
      for (auto& c : x) c += s * normal();
      d.push_back({pt(std::move(x)), t});
      t += (ties && uniform(0.0, 1.0) < 0.2) ? 0.0 : uniform(0.0, 1.5);
    }
    return d;
  }
};

/// Slot state rebuilt from scratch: for each slot the last arrival whose
/// hop draw fell below 1 / W (W summed directly over all earlier weights),
/// and bucket counts of every later point, decayed to `at_time`.
struct ReplaySlot {
  std::optional<std::size_t> held;  // index into the stream
  std::vector<double> counters;
};

inline int reference_bucket(const HacConfig& cfg, double d) {
  for (int k = 0; k <= cfg.c; ++k) {
    if (d <= cfg.r0 * std::pow(cfg.gamma, k)) return k;
  }
  return -1;
}

template <class Distance>
std::vector<ReplaySlot> reference_replay(const HacConfig& cfg, const Dataset& data, double at_time,
                                         const Distance& dist) {
  const std::size_t m = slot_count(cfg);
  auto weight = [&](double from, double to) {
    return std::isinf(cfg.tau) ? 1.0 : std::exp(-(to - from) / cfg.tau);
  };
  std::vector<double> w_total(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) {
    double w = 0.0;
    for (std::size_t l = 0; l <= j; ++l) w += weight(data[l].t, data[j].t);
    w_total[j] = w;
  }
  std::vector<ReplaySlot> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i].counters.assign(static_cast<std::size_t>(cfg.c) + 1, 0.0);
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (detail::hop_uniform(cfg.seed, i, j + 1) < 1.0 / w_total[j]) out[i].held = j;
    }
    if (!out[i].held) continue;
    for (std::size_t l = *out[i].held; l < data.size(); ++l) {
      const int k = reference_bucket(cfg, dist(data[*out[i].held].point, data[l].point));
      if (k >= 0) out[i].counters[static_cast<std::size_t>(k)] += weight(data[l].t, at_time);
    }
  }
  return out;
}

/// Straight O(n^2) neighbour count with unit weights, no shared code with
/// the oracle.
template <class Distance>
std::size_t count_within(const Dataset& data, const Point& p, double r, const Distance& dist) {
  std::size_t c = 0;
  for (const auto& tp : data) c += dist(p, tp.point) <= r ? 1 : 0;
  return c;
}

}  // namespace hac::testing
