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

// Node partitions, stochastic block models and sampled digraph instances.

#ifndef MISINFO_GRAPH_CORE_HPP_
#define MISINFO_GRAPH_CORE_HPP_

#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "misinfo/common.hpp"

namespace misinfo {

// Assignment of N dense node ids to k classes. Every class is non-empty.
class Partition {
 public:
  // Contiguous blocks: the first sizes[0] ids form class 0, and so on.
  static Partition from_sizes(std::vector<std::size_t> sizes) {
    if (sizes.empty()) throw InvalidArgument("partition needs at least one class");
    std::vector<ClassIndex> class_of;
    for (std::size_t u = 0; u < sizes.size(); ++u) {
      if (sizes[u] == 0)
        throw InvalidArgument(detail::concat("partition class ", u, " is empty"));
      class_of.insert(class_of.end(), sizes[u], static_cast<ClassIndex>(u));
    }
    return Partition(std::move(class_of), std::move(sizes));
  }

  // Arbitrary labelling; k is one past the largest label and every label
  // in [0, k) must be used.
  static Partition from_class_of(std::vector<ClassIndex> class_of) {
    if (class_of.empty()) throw InvalidArgument("partition needs at least one node");
    const std::size_t k = *std::max_element(class_of.begin(), class_of.end()) + 1;
    std::vector<std::size_t> sizes(k, 0);
    for (ClassIndex c : class_of) ++sizes[c];
    for (std::size_t u = 0; u < k; ++u) {
      if (sizes[u] == 0)
        throw InvalidArgument(detail::concat("partition class ", u, " is empty"));
    }
    return Partition(std::move(class_of), std::move(sizes));
  }

  std::size_t num_classes() const { return sizes_.size(); }
  std::size_t num_nodes() const { return class_of_.size(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const std::vector<ClassIndex>& class_of() const { return class_of_; }

  ClassIndex class_of(NodeId i) const {
    check_node(i);
    return class_of_[i];
  }

  void check_node(NodeId i) const {
    if (i >= class_of_.size()) {
      throw InvalidArgument(detail::concat("node id ", i, " out of range [0, ",
                                           class_of_.size(), ")"));
    }
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  Partition(std::vector<ClassIndex> class_of, std::vector<std::size_t> sizes)
      : class_of_(std::move(class_of)), sizes_(std::move(sizes)) {}

  std::vector<ClassIndex> class_of_;
  std::vector<std::size_t> sizes_;
};

using PartitionPtr = std::shared_ptr<const Partition>;

inline PartitionPtr share(Partition p) {
  return std::make_shared<const Partition>(std::move(p));
}

// G_SBM(C, [b_uv]): node pair (i, j) with i in C_u, j in C_v carries
// transfer probability b_uv. The partition is shared between models built
// over the same population.
class SbmModel {
 public:
  SbmModel(PartitionPtr partition, BlockMatrix block)
      : partition_(std::move(partition)), block_(std::move(block)) {
    if (!partition_) throw InvalidArgument("SBM requires a partition");
    if (block_.size() != partition_->num_classes()) {
      throw InvalidArgument(detail::concat("block matrix is ", block_.size(), "x",
                                           block_.size(), " but partition has ",
                                           partition_->num_classes(), " classes"));
    }
    require_probabilities(block_, "block matrix");
  }

  const Partition& partition() const { return *partition_; }
  const PartitionPtr& partition_ptr() const { return partition_; }
  const BlockMatrix& block() const { return block_; }
  std::size_t num_classes() const { return block_.size(); }
  std::size_t num_nodes() const { return partition_->num_nodes(); }

 private:
  PartitionPtr partition_;
  BlockMatrix block_;
};

inline bool same_partition(const SbmModel& a, const SbmModel& b) {
  return a.partition_ptr() == b.partition_ptr() || a.partition() == b.partition();
}

struct DirectedGraphInstance {
  std::size_t n_total = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;  // sorted (i, j), i != j
};

inline double edge_prob(const SbmModel& model, NodeId i, NodeId j) {
  const ClassIndex u = model.partition().class_of(i);
  const ClassIndex v = model.partition().class_of(j);
  if (i == j) return 0.0;
  return model.block()(u, v);
}

// Every ordered non-loop pair is kept independently with its block
// probability. Within a block the kept pairs are found by geometric skips, so
// sparse models cost O(N + |E|) rather than O(N^2).
inline DirectedGraphInstance sample_instance(const SbmModel& model, Rng& rng) {
  const Partition& part = model.partition();
  const std::size_t n = part.num_nodes();
  DirectedGraphInstance g{n, {}};
  for (NodeId i = 0; i < n; ++i) {
    const ClassIndex u = part.class_of()[i];
    NodeId j = 0;
    while (j < n) {
      const ClassIndex v = part.class_of()[j];
      // run of equal class starting at j
      NodeId end = j;
      while (end < n && part.class_of()[end] == v) ++end;
      const double p = model.block()(u, v);
      if (p >= 1.0) {
        for (NodeId x = j; x < end; ++x)
          if (x != i) g.edges.emplace_back(i, x);
      } else if (p > 0.0) {
        std::geometric_distribution<std::uint64_t> skip(p);
        std::uint64_t x = j + skip(rng);
        while (x < end) {
          if (x != i) g.edges.emplace_back(i, static_cast<NodeId>(x));
          x += 1 + skip(rng);
        }
      }
      j = end;
    }
  }
  return g;
}

inline std::vector<std::size_t> class_counts(const Partition& partition,
                                             std::span<const NodeId> nodes) {
  std::vector<std::size_t> counts(partition.num_classes(), 0);
  for (NodeId i : nodes) ++counts[partition.class_of(i)];
  return counts;
}

}  // namespace misinfo

#endif  // MISINFO_GRAPH_CORE_HPP_
