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

// Discrete-time SIR propagation of a single content item.
//
// A step takes the infected front I_t and exposes every susceptible node to
// it. With infectious period m = 1 (the default) this is the independent
// cascade process: each newly infected node gets one chance per susceptible
// node. How a susceptible node gets infected is delegated to a transmission
// policy, so the same stepping logic drives block-level sampling, traced
// sampling that logs individual transfers, coupled sampling with common
// random numbers, and fixed graph instances.

#ifndef MISINFO_CASCADE_SIM_HPP_
#define MISINFO_CASCADE_SIM_HPP_

#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "misinfo/graph_core.hpp"

namespace misinfo {

enum class NodeStatus : std::uint8_t { kSusceptible, kInfected, kRemoved };

// One content transfer: `from` was infectious at step `step` and `to` joined
// the infected front at step + 1.
struct Transfer {
  NodeId from = 0;
  NodeId to = 0;
  std::uint32_t step = 0;
  friend bool operator==(const Transfer&, const Transfer&) = default;
};

// S_t, I_t, R_t for one content item. Stored as a per-node status vector plus
// the infected list and per-class tallies, which is what the optimizers read.
class SirState {
 public:
  SirState(PartitionPtr partition, std::span<const NodeId> seeds, int infectious_period = 1)
      : partition_(std::move(partition)), period_(infectious_period) {
    if (!partition_) throw InvalidArgument("SIR state requires a partition");
    if (period_ < 1) throw InvalidArgument("infectious period must be >= 1");
    const std::size_t n = partition_->num_nodes();
    const std::size_t k = partition_->num_classes();
    status_.assign(n, NodeStatus::kSusceptible);
    age_.assign(n, 0);
    s_counts_.assign(partition_->sizes().begin(), partition_->sizes().end());
    i_counts_.assign(k, 0);
    r_counts_.assign(k, 0);
    for (NodeId i : seeds) {
      partition_->check_node(i);
      if (status_[i] == NodeStatus::kInfected) continue;
      status_[i] = NodeStatus::kInfected;
      infected_.push_back(i);
      const ClassIndex u = partition_->class_of()[i];
      --s_counts_[u];
      ++i_counts_[u];
    }
    std::sort(infected_.begin(), infected_.end());
  }

  std::size_t t() const { return t_; }
  int infectious_period() const { return period_; }
  const Partition& partition() const { return *partition_; }
  const PartitionPtr& partition_ptr() const { return partition_; }

  NodeStatus status(NodeId i) const { return status_[i]; }
  const std::vector<NodeStatus>& statuses() const { return status_; }
  // Steps node i has been infected for; meaningful only for infected nodes.
  int age(NodeId i) const { return age_[i]; }

  const std::vector<NodeId>& infected() const { return infected_; }
  std::vector<NodeId> susceptible() const { return collect(NodeStatus::kSusceptible); }
  std::vector<NodeId> removed() const { return collect(NodeStatus::kRemoved); }

  const std::vector<std::size_t>& susceptible_counts() const { return s_counts_; }
  const std::vector<std::size_t>& infected_counts() const { return i_counts_; }
  const std::vector<std::size_t>& removed_counts() const { return r_counts_; }
  std::size_t num_infected() const { return infected_.size(); }
  std::size_t num_susceptible() const {
    return std::accumulate(s_counts_.begin(), s_counts_.end(), std::size_t{0});
  }
  std::size_t num_removed() const {
    return std::accumulate(r_counts_.begin(), r_counts_.end(), std::size_t{0});
  }
  bool terminal() const { return infected_.empty(); }

  // Moves the state to t + 1: infected nodes that reached the end of their
  // infectious period are removed, the rest age by one, and `newly_infected`
  // (which must all be susceptible) join I_{t+1} with age 0.
  void advance(std::span<const NodeId> newly_infected) {
    std::vector<NodeId> next;
    next.reserve(newly_infected.size() + (period_ > 1 ? infected_.size() : 0));
    for (NodeId i : infected_) {
      const ClassIndex u = partition_->class_of()[i];
      if (age_[i] + 1 >= period_) {
        status_[i] = NodeStatus::kRemoved;
        --i_counts_[u];
        ++r_counts_[u];
      } else {
        ++age_[i];
        next.push_back(i);
      }
    }
    for (NodeId j : newly_infected) {
      if (status_[j] != NodeStatus::kSusceptible)
        throw InvalidArgument(detail::concat("node ", j, " is not susceptible"));
      const ClassIndex v = partition_->class_of()[j];
      status_[j] = NodeStatus::kInfected;
      age_[j] = 0;
      --s_counts_[v];
      ++i_counts_[v];
      next.push_back(j);
    }
    std::sort(next.begin(), next.end());
    infected_ = std::move(next);
    ++t_;
  }

 private:
  std::vector<NodeId> collect(NodeStatus s) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < status_.size(); ++i)
      if (status_[i] == s) out.push_back(i);
    return out;
  }

  PartitionPtr partition_;
  int period_ = 1;
  std::size_t t_ = 0;
  std::vector<NodeStatus> status_;
  std::vector<int> age_;
  std::vector<NodeId> infected_;
  std::vector<std::size_t> s_counts_, i_counts_, r_counts_;
};

// Per receiving class v, probability that a susceptible node of class v is
// reached by at least one infected node: 1 - prod_u (1 - b_uv)^{n_u}.
inline std::vector<double> infection_probabilities(const BlockMatrix& block,
                                                   std::span<const std::size_t> i_counts) {
  const std::size_t k = block.size();
  std::vector<double> p(k);
  for (std::size_t v = 0; v < k; ++v) {
    double log_escape = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
      if (i_counts[u] == 0) continue;
      const double q = 1.0 - block(u, v);
      if (q <= 0.0) {
        log_escape = -std::numeric_limits<double>::infinity();
        break;
      }
      log_escape += static_cast<double>(i_counts[u]) * std::log1p(-block(u, v));
    }
    p[v] = -std::expm1(log_escape);
  }
  return p;
}

// Block-level sampling: one uniform per susceptible node. Distributionally
// identical to sampling each (infected, susceptible) pair of the SBM.
struct BlockTransmission {
  const BlockMatrix& block;

  std::vector<NodeId> operator()(const SirState& state, Rng& rng,
                                 std::vector<Transfer>* /*log*/ = nullptr) const {
    std::vector<NodeId> newly;
    if (state.terminal()) return newly;
    const auto p = infection_probabilities(block, state.infected_counts());
    const auto& cls = state.partition().class_of();
    const auto& st = state.statuses();
    for (NodeId j = 0; j < st.size(); ++j) {
      if (st[j] != NodeStatus::kSusceptible) continue;
      const double pj = p[cls[j]];
      if (pj <= 0.0) continue;
      if (uniform01(rng) < pj) newly.push_back(j);
    }
    return newly;
  }
};

// Samples the number of successful transfers from every infected class into
// every susceptible node, and names the senders. Slower than
// BlockTransmission but yields the transfer log the estimator and the replay
// pipeline consume.
struct TracedTransmission {
  const BlockMatrix& block;

  std::vector<NodeId> operator()(const SirState& state, Rng& rng,
                                 std::vector<Transfer>* log = nullptr) const {
    std::vector<NodeId> newly;
    if (state.terminal()) return newly;
    const Partition& part = state.partition();
    const std::size_t k = part.num_classes();
    std::vector<std::vector<NodeId>> by_class(k);
    for (NodeId i : state.infected()) by_class[part.class_of()[i]].push_back(i);
    const auto& st = state.statuses();
    std::vector<NodeId> pool;
    for (NodeId j = 0; j < st.size(); ++j) {
      if (st[j] != NodeStatus::kSusceptible) continue;
      const ClassIndex v = part.class_of()[j];
      bool hit = false;
      for (std::size_t u = 0; u < k; ++u) {
        const auto n_u = by_class[u].size();
        const double b = block(u, v);
        if (n_u == 0 || b <= 0.0) continue;
        std::binomial_distribution<std::size_t> draw(n_u, b);
        const std::size_t c = draw(rng);
        if (c == 0) continue;
        hit = true;
        if (log) {
          pool = by_class[u];
          // partial Fisher-Yates: c distinct senders
          for (std::size_t x = 0; x < c; ++x) {
            std::uniform_int_distribution<std::size_t> pick(x, pool.size() - 1);
            std::swap(pool[x], pool[pick(rng)]);
            log->push_back({pool[x], j, static_cast<std::uint32_t>(state.t())});
          }
        }
      }
      if (hit) newly.push_back(j);
    }
    return newly;
  }
};

// Common random numbers: the pair (i, j) at infection age a transmits iff
// U(key, i, j, a) < b_{class(i) class(j)}. Two runs sharing a key see the
// same uniforms, so raising any block entry can only add transfers.
struct CoupledTransmission {
  const BlockMatrix& block;
  std::uint64_t key;

  static double pair_uniform(std::uint64_t key, NodeId i, NodeId j, int age) {
    const std::uint64_t h = derive_seed(key, i, j, static_cast<std::uint64_t>(age));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  }

  std::vector<NodeId> operator()(const SirState& state, Rng& /*rng*/,
                                 std::vector<Transfer>* log = nullptr) const {
    std::vector<NodeId> newly;
    const auto& cls = state.partition().class_of();
    const auto& st = state.statuses();
    for (NodeId j = 0; j < st.size(); ++j) {
      if (st[j] != NodeStatus::kSusceptible) continue;
      bool hit = false;
      for (NodeId i : state.infected()) {
        if (pair_uniform(key, i, j, state.age(i)) < block(cls[i], cls[j])) {
          hit = true;
          if (log) log->push_back({i, j, static_cast<std::uint32_t>(state.t())});
          else break;
        }
      }
      if (hit) newly.push_back(j);
    }
    return newly;
  }
};

// Fixed follower graph: an infected node transfers along each of its
// out-edges with probability survival(class(i), class(j)); an all-ones
// matrix means every edge of the instance carries the content.
class InstanceTransmission {
 public:
  InstanceTransmission(const DirectedGraphInstance& graph, BlockMatrix survival)
      : survival_(std::move(survival)), offsets_(graph.n_total + 1, 0) {
    for (const auto& e : graph.edges) ++offsets_[e.first + 1];
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    targets_.resize(graph.edges.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : graph.edges) targets_[fill[e.first]++] = e.second;
  }

  std::vector<NodeId> operator()(const SirState& state, Rng& rng,
                                 std::vector<Transfer>* log = nullptr) const {
    const auto& cls = state.partition().class_of();
    std::vector<char> reached(cls.size(), 0);
    std::vector<NodeId> newly;
    for (NodeId i : state.infected()) {
      for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
        const NodeId j = targets_[e];
        if (state.status(j) != NodeStatus::kSusceptible) continue;
        const double s = survival_(cls[i], cls[j]);
        if (s < 1.0 && !(uniform01(rng) < s)) continue;
        if (log) log->push_back({i, j, static_cast<std::uint32_t>(state.t())});
        if (!reached[j]) {
          reached[j] = 1;
          newly.push_back(j);
        }
      }
    }
    std::sort(newly.begin(), newly.end());
    return newly;
  }

 private:
  BlockMatrix survival_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

template <typename Transmission>
SirState sir_step(SirState state, const Transmission& transmission, Rng& rng,
                  std::vector<Transfer>* log = nullptr) {
  if (state.terminal()) {
    state.advance({});
    return state;
  }
  const auto newly = transmission(state, rng, log);
  state.advance(newly);
  return state;
}

inline SirState sir_step(SirState state, const SbmModel& model, Rng& rng) {
  return sir_step(std::move(state), BlockTransmission{model.block()}, rng);
}

// Trajectory of one content item. steps[t] holds the per-class counts of
// I_t for t = 0 .. terminated_at; the last entry is the empty front unless
// the run was cut off by a step cap.
struct CascadeRecord {
  std::vector<NodeId> seeds;
  std::vector<std::vector<std::size_t>> steps;
  std::size_t r_infinity = 0;
  std::size_t terminated_at = 0;
  std::vector<Transfer> transfers;  // filled by traced runs only

  std::vector<std::size_t> front_sizes() const {
    std::vector<std::size_t> out;
    out.reserve(steps.size());
    for (const auto& c : steps) out.push_back(std::accumulate(c.begin(), c.end(), std::size_t{0}));
    return out;
  }
};

// Appends the current front to `rec` and tracks the ever-infected count.
class CascadeRecorder {
 public:
  CascadeRecorder(const SirState& initial, std::span<const NodeId> seeds) {
    rec_.seeds.assign(seeds.begin(), seeds.end());
    std::sort(rec_.seeds.begin(), rec_.seeds.end());
    rec_.seeds.erase(std::unique(rec_.seeds.begin(), rec_.seeds.end()), rec_.seeds.end());
    rec_.r_infinity = initial.num_infected();
    rec_.steps.push_back(initial.infected_counts());
  }

  void observe(const SirState& next, std::size_t newly_infected) {
    rec_.r_infinity += newly_infected;
    rec_.steps.push_back(next.infected_counts());
    rec_.terminated_at = next.t();
  }

  std::vector<Transfer>* transfer_log() { return &rec_.transfers; }
  CascadeRecord finish() && { return std::move(rec_); }

 private:
  CascadeRecord rec_;
};

inline constexpr std::size_t kNoStepCap = std::numeric_limits<std::size_t>::max();

// Iterates steps until the infected front is empty (at most N steps for
// m = 1) or `max_steps` is reached.
template <typename Transmission>
CascadeRecord run_cascade_with(const PartitionPtr& partition, const Transmission& transmission,
                               std::span<const NodeId> seeds, int infectious_period, Rng& rng,
                               bool trace = false, std::size_t max_steps = kNoStepCap) {
  SirState state(partition, seeds, infectious_period);
  if (state.terminal()) {
    CascadeRecord rec;
    rec.steps.push_back(state.infected_counts());
    return rec;
  }
  CascadeRecorder recorder(state, seeds);
  while (!state.terminal() && state.t() < max_steps) {
    const std::size_t susceptible_before = state.num_susceptible();
    state = sir_step(std::move(state), transmission, rng,
                     trace ? recorder.transfer_log() : nullptr);
    recorder.observe(state, susceptible_before - state.num_susceptible());
  }
  return std::move(recorder).finish();
}

inline CascadeRecord run_cascade(const SbmModel& model, std::span<const NodeId> seeds,
                                 int infectious_period, Rng& rng) {
  return run_cascade_with(model.partition_ptr(), BlockTransmission{model.block()}, seeds,
                          infectious_period, rng);
}

inline CascadeRecord run_cascade_traced(const SbmModel& model, std::span<const NodeId> seeds,
                                        int infectious_period, Rng& rng) {
  return run_cascade_with(model.partition_ptr(), TracedTransmission{model.block()}, seeds,
                          infectious_period, rng, /*trace=*/true);
}

// Cascade on a fixed instance; resampling per cascade is the default
// elsewhere, this is the sensitivity-check mode.
inline CascadeRecord run_cascade_on_instance(const SbmModel& model,
                                             const DirectedGraphInstance& graph,
                                             std::span<const NodeId> seeds,
                                             int infectious_period, Rng& rng) {
  InstanceTransmission tx(graph, BlockMatrix(model.num_classes(), 1.0));
  return run_cascade_with(model.partition_ptr(), tx, seeds, infectious_period, rng);
}

// Distinct seeds drawn uniformly without replacement.
inline std::vector<NodeId> draw_seeds(std::size_t n_total, std::size_t count, Rng& rng) {
  if (count > n_total)
    throw InvalidArgument(detail::concat("cannot draw ", count, " seeds from ", n_total, " nodes"));
  std::vector<NodeId> seeds;
  seeds.reserve(count);
  // Floyd's algorithm
  std::vector<char> taken(n_total, 0);
  for (std::size_t j = n_total - count; j < n_total; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    std::size_t t = pick(rng);
    if (taken[t]) t = j;
    taken[t] = 1;
    seeds.push_back(static_cast<NodeId>(t));
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

struct CascadeSummary {
  std::size_t count = 0;
  double mean_size = 0.0;        // mean of R_inf / normalizer
  double mean_size_se = 0.0;
  double low_fraction = 0.0;     // fraction with R_inf < low_threshold
  double low_fraction_se = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_and_se(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

// Summary over R_inf values. `normalizer` divides the mean (N for the
// synthetic tables, 1 for raw counts); `low_threshold` is the strict cutoff
// for a low cascade (N/10 synthetic, 5 on datasets).
inline CascadeSummary summarize_sizes(std::span<const double> r_inf, double normalizer,
                                      double low_threshold) {
  if (r_inf.empty()) throw InvalidArgument("cascade statistics need at least one record");
  std::vector<double> sizes, lows;
  sizes.reserve(r_inf.size());
  lows.reserve(r_inf.size());
  for (double r : r_inf) {
    sizes.push_back(r / normalizer);
    lows.push_back(r < low_threshold ? 1.0 : 0.0);
  }
  CascadeSummary s;
  s.count = r_inf.size();
  std::tie(s.mean_size, s.mean_size_se) = detail::mean_and_se(sizes);
  std::tie(s.low_fraction, s.low_fraction_se) = detail::mean_and_se(lows);
  return s;
}

inline CascadeSummary cascade_statistics(std::span<const CascadeRecord> records,
                                         std::size_t n_total) {
  std::vector<double> r;
  r.reserve(records.size());
  for (const auto& rec : records) r.push_back(static_cast<double>(rec.r_infinity));
  const double n = static_cast<double>(n_total);
  return summarize_sizes(r, n, n / 10.0);
}

}  // namespace misinfo

#endif  // MISINFO_CASCADE_SIM_HPP_
