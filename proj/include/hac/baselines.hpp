#pragma once

// Comparison methods and scoring for "find the main n entities" runs.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hac/datagen.hpp"
#include "hac/error.hpp"
#include "hac/point.hpp"

namespace hac::baselines {

/// k points uniformly without replacement.
inline std::vector<Point> random_sample(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k > data.size()) {
    throw ContractError("random_sample: k = " + std::to_string(k) + " exceeds dataset size " +
                        std::to_string(data.size()));
  }
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first k entries are the sample.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<Point> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(data[idx[i]].point);
  return out;
}

/// Greedy independent set in random order: a point is kept iff it is at
/// least r away from every point kept so far. Kept points are returned in
/// the order they were kept.
template <class Distance>
std::vector<Point> maximal_independent_set(const Dataset& data, double r, std::uint64_t seed,
                                           const Distance& dist) {
  if (!(r > 0.0)) throw ContractError("maximal_independent_set: r must be positive");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Point> kept;
  for (std::size_t i : order) {
    const Point& p = data[i].point;
    const bool blocked = std::any_of(kept.begin(), kept.end(),
                                     [&](const Point& q) { return dist(p, q) < r; });
    if (!blocked) kept.push_back(p);
  }
  return kept;
}

struct EvalReport {
  std::size_t n = 0;
  std::size_t found = 0;
  std::size_t wrong = 0;
  std::size_t duplicate = 0;
  std::size_t missing = 0;

  double found_fraction() const { return n ? double(found) / double(n) : 0.0; }
};

/// The n most frequent non-noise labels, ties broken by label.
inline std::vector<std::string> top_entities(const Dataset& data, std::size_t n,
                                             const std::string& noise_label = datagen::kNoiseLabel) {
  std::map<std::string, std::size_t> counts;
  for (const auto& tp : data) {
    if (tp.point.label && *tp.point.label != noise_label) ++counts[*tp.point.label];
  }
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size() && i < n; ++i) out.push_back(v[i].first);
  return out;
}

/// Scores the first n outputs. Each output takes the label of its nearest
/// labeled data point if that point is within `threshold`; an output is
/// "found" the first time it names a top-n entity, "duplicate" on a repeat,
/// and "wrong" otherwise (noise, a minor entity, or nothing nearby). Unused
/// output slots count as "missing".
template <class Distance>
EvalReport eval_top_n(const std::vector<Point>& outputs, const Dataset& data, std::size_t n,
                      double threshold, const Distance& dist,
                      const std::string& noise_label = datagen::kNoiseLabel) {
  EvalReport rep;
  rep.n = n;
  const auto top = top_entities(data, n, noise_label);
  const std::set<std::string> top_set(top.begin(), top.end());
  std::set<std::string> hit;
  const std::size_t used = std::min(n, outputs.size());
  for (std::size_t i = 0; i < used; ++i) {
    double best = std::numeric_limits<double>::infinity();
    const std::string* label = nullptr;
    for (const auto& tp : data) {
      if (!tp.point.label) continue;
      const double d = dist(outputs[i], tp.point);
      if (d < best) {
        best = d;
        label = &*tp.point.label;
      }
    }
    if (!label || best > threshold || !top_set.count(*label)) {
      ++rep.wrong;
    } else if (hit.insert(*label).second) {
      ++rep.found;
    } else {
      ++rep.duplicate;
    }
  }
  rep.missing = n - used;
  return rep;
}

}  // namespace hac::baselines
