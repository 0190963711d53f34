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

// Per-content control loops. Each step re-optimizes the dropout matrix from
// the model networks G+ / G- and the observed front, alters the real
// network with it, and observes one propagation step.

#ifndef MISINFO_CONTROLLER_HPP_
#define MISINFO_CONTROLLER_HPP_

#include <functional>
#include <vector>

#include "misinfo/dropout_opt.hpp"
#include "misinfo/propagation_fit.hpp"

namespace misinfo {

enum class SolverKind { kConvex, kLpWithSoftFallback };

inline std::string_view to_string(SolverKind s) {
  return s == SolverKind::kConvex ? "convex" : "lp";
}

struct ControlConfig {
  double alpha = 1.5;
  double lambda = 1.0;
  SolverKind solver = SolverKind::kLpWithSoftFallback;
  std::size_t max_steps = 200;
  std::uint64_t seed = 0;
  int infectious_period = 1;
  ConvexOptions convex;

  void validate() const {
    if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    if (max_steps < 1) throw InvalidArgument("max_steps must be >= 1");
    if (infectious_period < 1) throw InvalidArgument("infectious period must be >= 1");
  }
};

struct ControlledRunRecord {
  CascadeRecord cascade;
  std::vector<SolverReport> reports;  // one per executed step

  std::vector<Branch> branches() const {
    std::vector<Branch> out;
    out.reserve(reports.size());
    for (const auto& r : reports) out.push_back(r.branch);
    return out;
  }
};

// Produces I_{t+1} \ I_t given the current state and the dropout chosen for
// this step. Transfers, if logged, go to `log`.
using Observer = std::function<std::vector<NodeId>(const SirState&, const DropoutMatrix&, Rng&,
                                                   std::vector<Transfer>* log)>;

// One SIR step on the real model altered by d.
inline Observer simulate_on(const SbmModel& real_model) {
  return [&real_model](const SirState& state, const DropoutMatrix& d, Rng& rng,
                       std::vector<Transfer>* log) {
    const SbmModel altered = apply_dropout(real_model, d);
    return BlockTransmission{altered.block()}(state, rng, log);
  };
}

// Same, with common random numbers keyed by `key` (see CoupledTransmission).
inline Observer simulate_coupled_on(const SbmModel& real_model, std::uint64_t key) {
  return [&real_model, key](const SirState& state, const DropoutMatrix& d, Rng& rng,
                            std::vector<Transfer>* log) {
    const SbmModel altered = apply_dropout(real_model, d);
    return CoupledTransmission{altered.block(), key}(state, rng, log);
  };
}

inline SolverReport choose_dropout(const ContentModelPair& models, const StepCounts& counts,
                                   const ControlConfig& config) {
  const BlockMatrix& bp = models.g_plus.block();
  const BlockMatrix& bm = models.g_minus.block();
  switch (config.solver) {
    case SolverKind::kConvex:
      if (feasibility_convex(counts, bp, config.alpha))
        return solve_convex(counts, bm, bp, config.alpha, config.convex);
      break;
    case SolverKind::kLpWithSoftFallback:
      if (feasibility_lp(counts, bp, config.alpha)) return solve_lp(counts, bm, bp, config.alpha);
      break;
  }
  return solve_soft(counts, bm, bp, config.lambda);
}

inline void require_same_partition(const ContentModelPair& models, const PartitionPtr& real) {
  auto same = [&](const SbmModel& m) {
    return m.partition_ptr() == real || m.partition() == *real;
  };
  if (!same(models.g_plus) || !same(models.g_minus))
    throw InvalidArgument("model networks and real network use different partitions");
}

// The control loop with a caller-supplied observation step.
inline ControlledRunRecord run_controlled(const ContentModelPair& models, const PartitionPtr& partition,
                                          std::span<const NodeId> seeds, const ControlConfig& config,
                                          Rng& rng, const Observer& observe, bool trace = false) {
  config.validate();
  require_same_partition(models, partition);
  ControlledRunRecord out;
  SirState state(partition, seeds, config.infectious_period);
  if (state.terminal()) {
    out.cascade.steps.push_back(state.infected_counts());
    return out;
  }
  CascadeRecorder recorder(state, seeds);
  while (!state.terminal() && state.t() < config.max_steps) {
    SolverReport report = choose_dropout(models, StepCounts::from_state(state), config);
    const auto newly = observe(state, report.d_star, rng, trace ? recorder.transfer_log() : nullptr);
    out.reports.push_back(std::move(report));
    state.advance(newly);
    recorder.observe(state, newly.size());
  }
  out.cascade = std::move(recorder).finish();
  return out;
}

// Control loop with a pluggable per-step solver (config.solver).
inline ControlledRunRecord run_algorithm1(const ContentModelPair& models, const SbmModel& real_model,
                                          std::span<const NodeId> seeds, const ControlConfig& config,
                                          Rng& rng) {
  return run_controlled(models, real_model.partition_ptr(), seeds, config, rng,
                        simulate_on(real_model));
}

// Linear program while feasible, softened program otherwise.
inline ControlledRunRecord run_algorithm2(const ContentModelPair& models, const SbmModel& real_model,
                                          std::span<const NodeId> seeds, ControlConfig config,
                                          Rng& rng) {
  config.solver = SolverKind::kLpWithSoftFallback;
  return run_algorithm1(models, real_model, seeds, config, rng);
}

// |I_{t+1}| / |I_t| for consecutive steps with a non-empty front.
inline std::vector<double> empirical_branching_ratios(const CascadeRecord& record) {
  if (record.steps.size() < 2)
    throw InvalidArgument("branching ratios need a record with at least two steps");
  const auto sizes = record.front_sizes();
  std::vector<double> out;
  for (std::size_t t = 0; t + 1 < sizes.size(); ++t)
    if (sizes[t] > 0) out.push_back(static_cast<double>(sizes[t + 1]) / static_cast<double>(sizes[t]));
  return out;
}

inline std::vector<double> empirical_branching_ratios(const ControlledRunRecord& record) {
  return empirical_branching_ratios(record.cascade);
}

}  // namespace misinfo

#endif  // MISINFO_CONTROLLER_HPP_
