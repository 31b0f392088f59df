#pragma once

// Offline ground truth over a fully materialized dataset. Everything here is
// O(n) per query point (O(n^2) for coverage) and meant for desk-scale checks
// of the sketch guarantees.
//
// Conventions: unit weights when tau is infinite, otherwise
// exp(-(at_time - t_i) / tau). A ball is closed (d <= r) and a density
// threshold is met with >= on f * total, computed left to right.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "hac/config.hpp"
#include "hac/error.hpp"
#include "hac/output.hpp"
#include "hac/point.hpp"

namespace hac::oracle {

/// Weight of every point at `at_time`.
inline std::vector<double> weights(const Dataset& data, double tau, double at_time) {
  std::vector<double> w(data.size(), 1.0);
  if (std::isinf(tau)) return w;
  for (std::size_t i = 0; i < data.size(); ++i) w[i] = std::exp(-(at_time - data[i].t) / tau);
  return w;
}

/// True iff the weight within distance r of p is at least f times the total.
template <class Distance>
bool is_dense(const Dataset& data, const Point& p, double r, double f, const Distance& dist,
              double tau = kInfiniteTimescale, double at_time = 0.0) {
  if (data.empty()) throw ContractError("is_dense: empty dataset");
  const auto w = weights(data, tau, at_time);
  double inside = 0.0, total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += w[i];
    if (dist(p, data[i].point) <= r) inside += w[i];
  }
  return inside >= f * total;
}

/// Smallest r such that p is (r, f)-dense: the weighted f-quantile of the
/// distances from p.
template <class Distance>
double r_f(const Dataset& data, const Point& p, double f, const Distance& dist,
           double tau = kInfiniteTimescale, double at_time = 0.0) {
  if (data.empty()) throw ContractError("r_f: empty dataset");
  if (!(f > 0.0 && f <= 1.0)) throw ContractError("r_f: f must be in (0, 1]");
  const auto w = weights(data, tau, at_time);
  std::vector<std::pair<double, double>> dw(data.size());
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    dw[i] = {dist(p, data[i].point), w[i]};
    total += w[i];
  }
  std::sort(dw.begin(), dw.end());
  const double need = f * total;
  // Accumulate whole groups of equal distances so the answer agrees with
  // is_dense, which counts every point at distance <= r.
  double cum = 0.0;
  for (std::size_t i = 0; i < dw.size();) {
    std::size_t j = i;
    while (j < dw.size() && dw[j].first == dw[i].first) cum += dw[j++].second;
    if (cum >= need) return dw[i].first;
    i = j;
  }
  // Rounding in the running sum can leave cum a hair below f * total at f = 1.
  return dw.back().first;
}

/// Admissibility of a sketch output against the exact prefix it was built
/// from: at least (1 - epsilon) f of the prefix weight lies within its radius.
/// `slack` relaxes the comparison by a relative amount for decayed runs,
/// whose totals are accumulated in a different order; keep it 0 otherwise.
template <class Distance>
bool verify_output(const Dataset& prefix, const Output& out, const HacConfig& cfg, double f,
                   double query_time, const Distance& dist, double slack = 0.0) {
  if (prefix.empty()) return false;
  const auto w = weights(prefix, cfg.tau, query_time);
  double inside = 0.0, total = 0.0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    total += w[i];
    if (dist(out.point, prefix[i].point) <= out.radius) inside += w[i];
  }
  const double need = (1.0 - cfg.epsilon) * f * total;
  return inside >= need * (1.0 - slack);
}

struct CoverageStats {
  double dense_covered_fraction = 0.0;
  double sparse_near_fraction = 0.0;
  std::size_t dense_points = 0;
  std::size_t sparse_points = 0;
};

/// For every dataset point decides (r, f)-density and (r, (1 - epsilon) f)-
/// sparsity (unit weights), then reports the share of dense points with an
/// output within r and the share of sparse points with an output within r.
/// A class with no members reports 0.
template <class Distance>
CoverageStats coverage_stats(const Dataset& data, const std::vector<Point>& outputs, double f,
                             double r, double epsilon, const Distance& dist) {
  CoverageStats st;
  const double n = static_cast<double>(data.size());
  std::vector<double> within(data.size(), 1.0);  // every point covers itself
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      if (dist(data[i].point, data[j].point) <= r) {
        within[i] += 1.0;
        within[j] += 1.0;
      }
    }
  }
  std::size_t dense_hit = 0, sparse_hit = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& a = data[i];
    const double inside = within[i];
    const bool dense = inside >= f * n;
    const bool sparse = !(inside >= (1.0 - epsilon) * f * n);
    const bool near = std::any_of(outputs.begin(), outputs.end(),
                                  [&](const Point& o) { return dist(o, a.point) <= r; });
    if (dense) {
      ++st.dense_points;
      if (near) ++dense_hit;
    }
    if (sparse) {
      ++st.sparse_points;
      if (near) ++sparse_hit;
    }
  }
  if (st.dense_points) st.dense_covered_fraction = double(dense_hit) / double(st.dense_points);
  if (st.sparse_points) st.sparse_near_fraction = double(sparse_hit) / double(st.sparse_points);
  return st;
}

inline std::vector<Point> output_points(const std::vector<Output>& outs) {
  std::vector<Point> pts;
  pts.reserve(outs.size());
  for (const auto& o : outs) pts.push_back(o.point);
  return pts;
}

template <class Distance>
CoverageStats coverage_stats(const Dataset& data, const std::vector<Output>& outputs, double f, double r,
                             double epsilon, const Distance& dist) {
  return coverage_stats(data, output_points(outputs), f, r, epsilon, dist);
}

}  // namespace hac::oracle
