#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "hac/error.hpp"
#include "hac/output.hpp"

namespace hac {

enum class DedupVariant { none, theorem, threshold };

struct DedupPolicy {
  DedupVariant variant = DedupVariant::none;
  /// Separation for the threshold variant.
  double r_d = 0.0;
};

inline DedupVariant dedup_variant_from_string(std::string_view s) {
  if (s == "none") return DedupVariant::none;
  if (s == "theorem") return DedupVariant::theorem;
  if (s == "threshold") return DedupVariant::threshold;
  throw ContractError("unknown dedup policy '" + std::string(s) + "'");
}

inline void validate(const DedupPolicy& p) {
  if (p.variant == DedupVariant::threshold && !(p.r_d >= 0.0)) {
    throw ContractError("dedup: threshold variant needs r_d >= 0");
  }
}

/// Keeps outputs whose balls B(o, radius(o)) are pairwise disjoint.
///
/// Outputs are visited by increasing radius (ties: higher freq_estimate,
/// then lower slot id); p is kept iff no kept o has d(o, p) <= radius(p) + radius(o).
/// The result is returned in visiting order.
template <class Distance>
std::vector<Output> dedup_theorem(std::vector<Output> outputs, const Distance& dist) {
  std::stable_sort(outputs.begin(), outputs.end(), [](const Output& a, const Output& b) {
    return output_before(QueryOrder::by_radius, a, b);
  });
  std::vector<Output> kept;
  for (auto& p : outputs) {
    const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const Output& o) {
      return dist(o.point, p.point) <= p.radius + o.radius;
    });
    if (!overlaps) kept.push_back(std::move(p));
  }
  return kept;
}

/// Greedy filter over outputs sorted by decreasing freq_estimate: an output
/// is kept iff it is farther than r_d from every output kept before it.
template <class Distance>
std::vector<Output> dedup_threshold(const std::vector<Output>& outputs, double r_d,
                                    const Distance& dist) {
  for (std::size_t i = 1; i < outputs.size(); ++i) {
    if (outputs[i].freq_estimate > outputs[i - 1].freq_estimate) {
      throw ContractError("dedup_threshold: outputs must be sorted by decreasing freq_estimate");
    }
  }
  std::vector<Output> kept;
  for (const auto& p : outputs) {
    const bool near = std::any_of(kept.begin(), kept.end(),
                                  [&](const Output& o) { return dist(o.point, p.point) <= r_d; });
    if (!near) kept.push_back(p);
  }
  return kept;
}

/// Applies `policy` to an arbitrary list of outputs. The threshold variant
/// first orders the list by frequency, as it requires.
template <class Distance>
std::vector<Output> apply_dedup(std::vector<Output> outputs, const DedupPolicy& policy,
                                const Distance& dist) {
  switch (policy.variant) {
    case DedupVariant::none:
      return outputs;
    case DedupVariant::theorem:
      return dedup_theorem(std::move(outputs), dist);
    case DedupVariant::threshold:
      std::stable_sort(outputs.begin(), outputs.end(), [](const Output& a, const Output& b) {
        return output_before(QueryOrder::by_frequency, a, b);
      });
      return dedup_threshold(outputs, policy.r_d, dist);
  }
  return outputs;
}

}  // namespace hac
