// Copyright 2026 The Misinfo Dropout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// True/false content models: construction from user-level re-share rates and
// frequentist estimation from observed cascades.

#ifndef MISINFO_PROPAGATION_FIT_HPP_
#define MISINFO_PROPAGATION_FIT_HPP_

#include <string>
#include <vector>

#include "misinfo/cascade_sim.hpp"

namespace misinfo {

enum class ContentLabel { kTrue, kFalse };

inline const char* to_string(ContentLabel l) { return l == ContentLabel::kTrue ? "true" : "false"; }

// r_plus[i] / r_minus[i]: probability that user i re-shares received true /
// false content.
struct UserParams {
  std::vector<double> r_plus;
  std::vector<double> r_minus;
};

// c_plus(u, v) / c_minus(u, v): probability that content shared by a class-u
// user is received by a class-v user.
struct ClassTransfer {
  BlockMatrix c_plus;
  BlockMatrix c_minus;
};

// G+ and G- over one shared population.
struct ContentModelPair {
  SbmModel g_plus;
  SbmModel g_minus;

  const SbmModel& for_label(ContentLabel l) const {
    return l == ContentLabel::kTrue ? g_plus : g_minus;
  }
};

// Entries where a class sends more to another class than to itself. Echo
// chambers normally keep c_uu >= c_uv, so these are reported, not rejected.
inline std::vector<std::string> echo_chamber_warnings(const ClassTransfer& transfer) {
  std::vector<std::string> out;
  auto scan = [&](const BlockMatrix& c, const char* name) {
    for (std::size_t u = 0; u < c.size(); ++u)
      for (std::size_t v = 0; v < c.size(); ++v)
        if (u != v && c(u, u) < c(u, v))
          out.push_back(detail::concat(name, "(", u, ",", u, ") < ", name, "(", u, ",", v, ")"));
  };
  scan(transfer.c_plus, "c_plus");
  scan(transfer.c_minus, "c_minus");
  return out;
}

// b_uv = c_uv times the mean re-share rate of class u.
inline ContentModelPair build_block_matrices(const UserParams& users, const ClassTransfer& transfer,
                                             const PartitionPtr& partition) {
  const std::size_t n = partition->num_nodes();
  const std::size_t k = partition->num_classes();
  if (users.r_plus.size() != n || users.r_minus.size() != n) {
    throw InvalidArgument(detail::concat("user parameter vectors must have length ", n));
  }
  if (transfer.c_plus.size() != k || transfer.c_minus.size() != k) {
    throw InvalidArgument(detail::concat("class transfer matrices must be ", k, "x", k));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (double r : {users.r_plus[i], users.r_minus[i]})
      if (!(r >= 0.0 && r <= 1.0))
        throw InvalidArgument(detail::concat("re-share probability of user ", i, " outside [0,1]"));
  }
  require_probabilities(transfer.c_plus, "c_plus");
  require_probabilities(transfer.c_minus, "c_minus");

  std::vector<double> mean_plus(k, 0.0), mean_minus(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const ClassIndex u = partition->class_of()[i];
    mean_plus[u] += users.r_plus[i];
    mean_minus[u] += users.r_minus[i];
  }
  BlockMatrix b_plus(k), b_minus(k);
  for (std::size_t u = 0; u < k; ++u) {
    const double size = static_cast<double>(partition->sizes()[u]);
    for (std::size_t v = 0; v < k; ++v) {
      b_plus(u, v) = std::clamp(mean_plus[u] / size * transfer.c_plus(u, v), 0.0, 1.0);
      b_minus(u, v) = std::clamp(mean_minus[u] / size * transfer.c_minus(u, v), 0.0, 1.0);
    }
  }
  return {SbmModel(partition, std::move(b_plus)), SbmModel(partition, std::move(b_minus))};
}

struct LabeledCascade {
  CascadeRecord record;
  ContentLabel label = ContentLabel::kFalse;
};

struct EstimateOptions {
  // Added to successes (and twice to opportunities) before dividing.
  double pseudo_count = 0.0;
};

// Pooled exposure tallies for one label. opportunities(u, v) sums
// |I_t^u| * |S_t^v| over steps; successes(u, v) counts u -> v transfers.
struct ExposureTally {
  BlockMatrix opportunities;
  BlockMatrix successes;
  std::size_t cascades = 0;

  explicit ExposureTally(std::size_t k = 0) : opportunities(k), successes(k) {}
};

struct BlockEstimate {
  ContentModelPair models;
  ExposureTally plus;
  ExposureTally minus;
  // Pairs with zero opportunities; their estimate is 0.
  std::vector<std::pair<std::size_t, std::size_t>> unobserved_plus, unobserved_minus;
};

// Adds one cascade's exposures to `tally`. S_t is reconstructed as the class
// sizes minus everyone reached up to and including step t, which assumes the
// cascade was recorded with infectious period 1. With a transfer log the
// successes are exact; without one, the new infections of class v at t + 1
// are split across sender classes in proportion to |I_t^u|.
inline void accumulate_exposures(const CascadeRecord& rec, const Partition& partition,
                                 ExposureTally& tally) {
  const std::size_t k = partition.num_classes();
  const auto& sizes = partition.sizes();
  if (rec.steps.empty()) return;
  for (const auto& c : rec.steps)
    if (c.size() != k)
      throw InvalidArgument(detail::concat("cascade step has ", c.size(), " classes, expected ", k));
  std::vector<double> reached(k, 0.0);
  for (std::size_t t = 0; t + 1 < rec.steps.size(); ++t) {
    const auto& front = rec.steps[t];
    for (std::size_t u = 0; u < k; ++u) reached[u] += static_cast<double>(front[u]);
    double front_total = 0.0;
    for (std::size_t u = 0; u < k; ++u) front_total += static_cast<double>(front[u]);
    for (std::size_t u = 0; u < k; ++u) {
      for (std::size_t v = 0; v < k; ++v) {
        const double s_v = std::max(0.0, static_cast<double>(sizes[v]) - reached[v]);
        tally.opportunities(u, v) += static_cast<double>(front[u]) * s_v;
      }
    }
    if (rec.transfers.empty() && front_total > 0.0) {
      const auto& next = rec.steps[t + 1];
      for (std::size_t v = 0; v < k; ++v)
        for (std::size_t u = 0; u < k; ++u)
          tally.successes(u, v) +=
              static_cast<double>(next[v]) * static_cast<double>(front[u]) / front_total;
    }
  }
  const std::size_t last_step = rec.steps.size() - 1;
  for (const Transfer& tr : rec.transfers) {
    if (tr.step >= last_step) continue;
    tally.successes(partition.class_of(tr.from), partition.class_of(tr.to)) += 1.0;
  }
  ++tally.cascades;
}

inline BlockMatrix estimate_from_tally(const ExposureTally& tally, const EstimateOptions& opts,
                                       std::vector<std::pair<std::size_t, std::size_t>>& unobserved) {
  const std::size_t k = tally.opportunities.size();
  BlockMatrix b(k);
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t v = 0; v < k; ++v) {
      const double opp = tally.opportunities(u, v);
      if (opp <= 0.0) {
        unobserved.emplace_back(u, v);
        continue;
      }
      b(u, v) = std::clamp((tally.successes(u, v) + opts.pseudo_count) /
                               (opp + 2.0 * opts.pseudo_count),
                           0.0, 1.0);
    }
  }
  return b;
}

inline BlockEstimate estimate_block_matrices(std::span<const LabeledCascade> cascades,
                                             const PartitionPtr& partition,
                                             const EstimateOptions& opts = {}) {
  const std::size_t k = partition->num_classes();
  ExposureTally plus(k), minus(k);
  for (const auto& c : cascades)
    accumulate_exposures(c.record, *partition,
                         c.label == ContentLabel::kTrue ? plus : minus);
  if (plus.cascades == 0)
    throw InsufficientDataError("no cascades labeled 'true' to estimate the true-content model");
  if (minus.cascades == 0)
    throw InsufficientDataError("no cascades labeled 'false' to estimate the false-content model");
  std::vector<std::pair<std::size_t, std::size_t>> un_plus, un_minus;
  BlockMatrix b_plus = estimate_from_tally(plus, opts, un_plus);
  BlockMatrix b_minus = estimate_from_tally(minus, opts, un_minus);
  return BlockEstimate{{SbmModel(partition, std::move(b_plus)), SbmModel(partition, std::move(b_minus))},
                       std::move(plus),
                       std::move(minus),
                       std::move(un_plus),
                       std::move(un_minus)};
}

struct MergedPartition {
  Partition partition;
  std::vector<ClassIndex> remap;  // old class -> new class
};

// Classes smaller than threshold_fraction * N are folded, in one pass, into a
// single residual class appended after the surviving classes (which keep
// their relative order). The residual class may itself be below threshold.
inline MergedPartition merge_small_partitions(const Partition& partition, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
    throw InvalidArgument("merge threshold must lie in (0, 1)");
  const std::size_t k = partition.num_classes();
  const double cutoff = threshold_fraction * static_cast<double>(partition.num_nodes());
  std::vector<ClassIndex> remap(k);
  ClassIndex next = 0;
  bool any_small = false;
  for (std::size_t u = 0; u < k; ++u) {
    if (static_cast<double>(partition.sizes()[u]) < cutoff) {
      any_small = true;
    } else {
      remap[u] = next++;
    }
  }
  if (!any_small) {
    std::iota(remap.begin(), remap.end(), ClassIndex{0});
    return {partition, std::move(remap)};
  }
  const ClassIndex residual = next;
  for (std::size_t u = 0; u < k; ++u)
    if (static_cast<double>(partition.sizes()[u]) < cutoff) remap[u] = residual;
  std::vector<ClassIndex> class_of(partition.num_nodes());
  for (std::size_t i = 0; i < class_of.size(); ++i) class_of[i] = remap[partition.class_of()[i]];
  return {Partition::from_class_of(std::move(class_of)), std::move(remap)};
}

// Re-expresses per-class step counts under a class remap.
inline CascadeRecord remap_classes(CascadeRecord rec, std::span<const ClassIndex> remap,
                                   std::size_t new_k) {
  for (auto& counts : rec.steps) {
    std::vector<std::size_t> merged(new_k, 0);
    for (std::size_t u = 0; u < counts.size(); ++u) merged.at(remap[u]) += counts[u];
    counts = std::move(merged);
  }
  return rec;
}

}  // namespace misinfo

#endif  // MISINFO_PROPAGATION_FIT_HPP_
