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

// Experiment orchestration: synthetic (x, y) sweeps, the dataset
// fit-and-replay pipeline, the extinction bound check, and stand-in corpus
// generation. Every trial draws from its own stream seeded by
// derive_seed(master, cell, trial, ...), so results do not depend on the
// number of worker threads.

#ifndef MISINFO_HARNESS_HPP_
#define MISINFO_HARNESS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "misinfo/controller.hpp"

namespace misinfo {

// b+ = base + x I - y (J - I),  b- = base - x I + y (J - I).
inline std::pair<BlockMatrix, BlockMatrix> synthetic_matrices(const BlockMatrix& base, double x,
                                                              double y) {
  const std::size_t k = base.size();
  BlockMatrix plus(k), minus(k);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) {
      const double shift = u == v ? x : -y;
      plus(u, v) = base(u, v) + shift;
      minus(u, v) = base(u, v) - shift;
    }
  if (!plus.all_within(0.0, 1.0) || !minus.all_within(0.0, 1.0))
    throw InvalidArgument(detail::concat("synthetic matrices at x=", x, ", y=", y,
                                         " leave [0,1]"));
  return {std::move(plus), std::move(minus)};
}

inline BlockMatrix default_base_matrix(std::size_t k) {
  BlockMatrix b(k, 0.002);
  for (std::size_t u = 0; u < k; ++u) b(u, u) = 0.01;
  return b;
}

// Evenly spaced points lo, ..., hi; a single point sits at lo.
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 1;

  double at(std::size_t i) const {
    if (points <= 1) return lo;
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return i + 1 == points ? hi : x;
  }
};

struct SyntheticConfig {
  std::string name = "balanced-2";
  std::vector<std::size_t> partition_sizes{500, 500};
  BlockMatrix base = default_base_matrix(2);
  GridAxis x{0.0, 0.01, 10};
  GridAxis y{0.0, 0.001, 10};
  std::size_t trials_per_cell = 20;
  std::size_t seeds_per_cascade = 10;
  std::optional<ControlConfig> control;  // nullopt: no alteration
  std::uint64_t master_seed = 1;
  unsigned threads = 0;

  void validate() const {
    if (partition_sizes.empty()) throw InvalidArgument("partition_sizes is empty");
    if (base.size() != partition_sizes.size())
      throw InvalidArgument("base matrix size does not match the number of classes");
    if (x.points < 1 || y.points < 1) throw InvalidArgument("grid axes need at least one point");
    if (trials_per_cell < 1) throw InvalidArgument("trials_per_cell must be >= 1");
    if (control) control->validate();
  }
};

struct SweepCell {
  std::size_t ix = 0, iy = 0;
  double x = 0.0, y = 0.0;
  bool valid = false;        // b+ and b- inside [0,1]
  bool feasible_t0 = false;  // linear feasibility at t = 0, seeds spread pro rata
  double lp_first_step_fraction = 0.0;  // controlled runs whose first step took the LP branch
  CascadeSummary true_stats;
  CascadeSummary false_stats;
  std::string note;
};

struct SweepResult {
  SyntheticConfig config;
  std::vector<SweepCell> cells;  // x-major, then y

  std::size_t valid_cells() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(),
                                                  [](const SweepCell& c) { return c.valid; }));
  }
};

// Grid-wide aggregate; every valid cell weighs the same.
struct CollatedStats {
  double true_mean = 0.0, false_mean = 0.0;
  double true_low = 0.0, false_low = 0.0;
  std::size_t cells = 0;
};

inline CollatedStats collate(const SweepResult& r) {
  CollatedStats s;
  for (const auto& c : r.cells) {
    if (!c.valid) continue;
    s.true_mean += c.true_stats.mean_size;
    s.false_mean += c.false_stats.mean_size;
    s.true_low += c.true_stats.low_fraction;
    s.false_low += c.false_stats.low_fraction;
    ++s.cells;
  }
  if (s.cells > 0) {
    const double n = static_cast<double>(s.cells);
    s.true_mean /= n;
    s.false_mean /= n;
    s.true_low /= n;
    s.false_low /= n;
  }
  return s;
}

// Expected front at t = 0 with seeds spread over classes in proportion to
// class size.
inline StepCounts pro_rata_initial_counts(const std::vector<std::size_t>& sizes, std::size_t seeds) {
  const double n = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  std::vector<double> s, i;
  for (std::size_t sz : sizes) {
    const double share = static_cast<double>(seeds) * static_cast<double>(sz) / n;
    i.push_back(share);
    s.push_back(static_cast<double>(sz) - share);
  }
  return StepCounts::make(std::move(s), std::move(i));
}

struct PairedTrial {
  CascadeRecord true_run;
  CascadeRecord false_run;
  std::optional<Branch> first_branch;
};

// True and false content start from the same seeds and draw from the same
// stream, so their comparison is paired.
inline PairedTrial run_paired_trial(const ContentModelPair& models, std::size_t seeds_per_cascade,
                                    const std::optional<ControlConfig>& control, std::uint64_t stream) {
  PairedTrial out;
  Rng seed_rng(derive_seed(stream, 0));
  const auto seeds = draw_seeds(models.g_plus.num_nodes(), seeds_per_cascade, seed_rng);
  for (int which = 0; which < 2; ++which) {
    const SbmModel& real = which == 0 ? models.g_plus : models.g_minus;
    Rng rng(derive_seed(stream, 1));
    CascadeRecord rec;
    if (control) {
      auto run = run_algorithm1(models, real, seeds, *control, rng);
      if (which == 0 && !run.reports.empty()) out.first_branch = run.reports.front().branch;
      rec = std::move(run.cascade);
    } else {
      rec = run_cascade(real, seeds, 1, rng);
    }
    (which == 0 ? out.true_run : out.false_run) = std::move(rec);
  }
  return out;
}

inline SweepResult run_sweep(const SyntheticConfig& config) {
  config.validate();
  SweepResult result{config, {}};
  const auto partition = share(Partition::from_sizes(config.partition_sizes));
  const std::size_t n = partition->num_nodes();
  const std::size_t nx = config.x.points, ny = config.y.points;
  result.cells.resize(nx * ny);
  parallel_for(
      nx * ny,
      [&](std::size_t idx) {
        SweepCell& cell = result.cells[idx];
        cell.ix = idx / ny;
        cell.iy = idx % ny;
        cell.x = config.x.at(cell.ix);
        cell.y = config.y.at(cell.iy);
        std::optional<ContentModelPair> models;
        try {
          auto [bp, bm] = synthetic_matrices(config.base, cell.x, cell.y);
          models.emplace(ContentModelPair{SbmModel(partition, std::move(bp)),
                                          SbmModel(partition, std::move(bm))});
        } catch (const InvalidArgument& e) {
          cell.note = e.what();
          return;
        }
        cell.valid = true;
        const double alpha = config.control ? config.control->alpha : 0.0;
        cell.feasible_t0 = feasibility_lp(
            pro_rata_initial_counts(config.partition_sizes, config.seeds_per_cascade),
            models->g_plus.block(), alpha);
        std::vector<double> r_true, r_false;
        std::size_t lp_first = 0;
        for (std::size_t trial = 0; trial < config.trials_per_cell; ++trial) {
          const auto paired = run_paired_trial(*models, config.seeds_per_cascade, config.control,
                                               derive_seed(config.master_seed, idx, trial));
          r_true.push_back(static_cast<double>(paired.true_run.r_infinity));
          r_false.push_back(static_cast<double>(paired.false_run.r_infinity));
          if (paired.first_branch == Branch::kLp) ++lp_first;
        }
        const double nn = static_cast<double>(n);
        cell.true_stats = summarize_sizes(r_true, nn, nn / 10.0);
        cell.false_stats = summarize_sizes(r_false, nn, nn / 10.0);
        cell.lp_first_step_fraction =
            static_cast<double>(lp_first) / static_cast<double>(config.trials_per_cell);
      },
      config.threads);
  return result;
}

// A sweep is infeasible everywhere when no cell has valid matrices, or, for
// controlled sweeps, when no valid cell passes the t = 0 feasibility test.
inline bool infeasible_everywhere(const SweepResult& r) {
  bool any = false;
  for (const auto& c : r.cells)
    if (c.valid && (!r.config.control || c.feasible_t0)) any = true;
  return !any;
}

// Largest per-cell relative drop of the false-content mean between a control
// sweep and a controlled sweep over the same grid.
inline double max_false_reduction(const SweepResult& control, const SweepResult& treated) {
  if (control.cells.size() != treated.cells.size())
    throw InvalidArgument("sweeps cover different grids");
  double best = 0.0;
  for (std::size_t i = 0; i < control.cells.size(); ++i) {
    const auto& c = control.cells[i];
    const auto& t = treated.cells[i];
    if (!c.valid || !t.valid || c.false_stats.mean_size <= 0.0) continue;
    best = std::max(best, 1.0 - t.false_stats.mean_size / c.false_stats.mean_size);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Dataset side.

struct GeneratorConfig {
  std::vector<std::size_t> partition_sizes{800, 200};
  BlockMatrix base = default_base_matrix(2);
  double x = 0.005;
  double y = 0.0005;
  std::size_t cascades = 500;  // split evenly between labels, true first on odd counts
  std::size_t seeds_per_cascade = 10;
  std::uint64_t seed = 1;
};

struct GeneratedDataset {
  PartitionPtr partition;
  ContentModelPair truth;
  std::vector<LabeledCascade> cascades;
};

// Traced cascades from known G+ / G-, i.e. a labeled corpus with the
// transfer logs the estimator and replay need.
inline GeneratedDataset generate_dataset(const GeneratorConfig& cfg) {
  auto partition = share(Partition::from_sizes(cfg.partition_sizes));
  auto [bp, bm] = synthetic_matrices(cfg.base, cfg.x, cfg.y);
  GeneratedDataset out{partition,
                       {SbmModel(partition, std::move(bp)), SbmModel(partition, std::move(bm))},
                       {}};
  out.cascades.resize(cfg.cascades);
  parallel_for(cfg.cascades, [&](std::size_t c) {
    const ContentLabel label = c < (cfg.cascades + 1) / 2 ? ContentLabel::kTrue : ContentLabel::kFalse;
    Rng rng(derive_seed(cfg.seed, c));
    const auto seeds = draw_seeds(partition->num_nodes(), cfg.seeds_per_cascade, rng);
    out.cascades[c] = {run_cascade_traced(out.truth.for_label(label), seeds, 1, rng), label};
  });
  return out;
}

// Replays a recorded cascade: node j joins I_{t+1} when at least one of its
// logged step-t transfers comes from a node in the replayed I_t and survives
// a coin flip with probability d(class(from), class(to)).
class ReplayObserver {
 public:
  explicit ReplayObserver(const CascadeRecord& rec) {
    for (const Transfer& tr : rec.transfers) {
      if (tr.step >= by_step_.size()) by_step_.resize(tr.step + 1);
      by_step_[tr.step].push_back(tr);
    }
  }

  std::vector<NodeId> operator()(const SirState& state, const DropoutMatrix& d, Rng& rng,
                                 std::vector<Transfer>* log) const {
    std::vector<NodeId> newly;
    if (state.t() >= by_step_.size()) return newly;
    const auto& cls = state.partition().class_of();
    std::vector<NodeId> reached;
    for (const Transfer& tr : by_step_[state.t()]) {
      if (state.status(tr.from) != NodeStatus::kInfected) continue;
      if (state.status(tr.to) != NodeStatus::kSusceptible) continue;
      const double keep = d(cls[tr.from], cls[tr.to]);
      if (keep < 1.0 && !(uniform01(rng) < keep)) continue;
      if (log) log->push_back(tr);
      newly.push_back(tr.to);
    }
    std::sort(newly.begin(), newly.end());
    newly.erase(std::unique(newly.begin(), newly.end()), newly.end());
    return newly;
  }

 private:
  std::vector<std::vector<Transfer>> by_step_;
};

inline ControlledRunRecord replay_cascade(const ContentModelPair& models, const PartitionPtr& partition,
                                          const CascadeRecord& rec,
                                          const std::optional<ControlConfig>& control, Rng& rng) {
  const ReplayObserver replay(rec);
  if (!control) {
    // no alteration: every logged transfer survives
    ControlledRunRecord out;
    SirState state(partition, rec.seeds);
    if (state.terminal()) {
      out.cascade.steps.push_back(state.infected_counts());
      return out;
    }
    CascadeRecorder recorder(state, rec.seeds);
    const auto ones = DropoutMatrix::ones(partition->num_classes());
    while (!state.terminal()) {
      const auto newly = replay(state, ones, rng, nullptr);
      state.advance(newly);
      recorder.observe(state, newly.size());
    }
    out.cascade = std::move(recorder).finish();
    return out;
  }
  Observer obs = [&replay](const SirState& s, const DropoutMatrix& d, Rng& r,
                           std::vector<Transfer>* log) { return replay(s, d, r, log); };
  return run_controlled(models, partition, rec.seeds, *control, rng, obs);
}

struct PipelineOptions {
  double merge_threshold = 0.01;
  std::size_t samples = 500;  // per label; 0 replays every cascade once
  std::uint64_t seed = 1;
  EstimateOptions estimate;
  double low_threshold = 5.0;  // raw cascade size cutoff for the low-cascade rate
  unsigned threads = 0;
};

struct PipelineRow {
  std::optional<ControlConfig> control;
  CascadeSummary true_stats;   // raw R_inf (normalizer 1)
  CascadeSummary false_stats;
  double true_recorded_mean = 0.0;  // mean recorded R_inf of the drawn cascades
  double false_recorded_mean = 0.0;
};

struct PipelineResult {
  MergedPartition merged;
  BlockEstimate estimate;
  std::vector<PipelineRow> rows;
};

inline PipelineResult run_dataset_pipeline(const Partition& partition,
                                           const std::vector<LabeledCascade>& dataset,
                                           const std::vector<std::optional<ControlConfig>>& configs,
                                           const PipelineOptions& opts) {
  if (dataset.empty()) throw InsufficientDataError("dataset is empty");
  MergedPartition merged = merge_small_partitions(partition, opts.merge_threshold);
  const auto merged_ptr = share(merged.partition);
  const std::size_t k = merged_ptr->num_classes();
  std::vector<LabeledCascade> remapped;
  remapped.reserve(dataset.size());
  for (const auto& c : dataset) remapped.push_back({remap_classes(c.record, merged.remap, k), c.label});
  BlockEstimate estimate = estimate_block_matrices(remapped, merged_ptr, opts.estimate);

  std::map<ContentLabel, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < remapped.size(); ++i) groups[remapped[i].label].push_back(i);
  std::map<ContentLabel, std::vector<std::size_t>> drawn;
  for (auto& [label, idx] : groups) {
    if (opts.samples == 0) {
      drawn[label] = idx;
      continue;
    }
    Rng rng(derive_seed(opts.seed, label == ContentLabel::kTrue ? 1 : 2));
    std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
    for (std::size_t s = 0; s < opts.samples; ++s) drawn[label].push_back(idx[pick(rng)]);
  }

  PipelineResult out{std::move(merged), std::move(estimate), {}};
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    PipelineRow row;
    row.control = configs[ci];
    for (ContentLabel label : {ContentLabel::kTrue, ContentLabel::kFalse}) {
      const auto& picks = drawn[label];
      std::vector<double> replayed(picks.size()), recorded(picks.size());
      parallel_for(
          picks.size(),
          [&](std::size_t s) {
            const auto& rec = remapped[picks[s]].record;
            Rng rng(derive_seed(opts.seed, ci, label == ContentLabel::kTrue ? 1 : 2, s));
            const auto run = replay_cascade(out.estimate.models, merged_ptr, rec, configs[ci], rng);
            replayed[s] = static_cast<double>(run.cascade.r_infinity);
            recorded[s] = static_cast<double>(rec.r_infinity);
          },
          opts.threads);
      const auto stats = summarize_sizes(replayed, 1.0, opts.low_threshold);
      const double rec_mean = std::accumulate(recorded.begin(), recorded.end(), 0.0) /
                              static_cast<double>(recorded.size());
      if (label == ContentLabel::kTrue) {
        row.true_stats = stats;
        row.true_recorded_mean = rec_mean;
      } else {
        row.false_stats = stats;
        row.false_recorded_mean = rec_mean;
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extinction bound check on the true-content network.

struct BoundCheckConfig {
  std::vector<std::size_t> partition_sizes{500, 500};
  BlockMatrix base = default_base_matrix(2);
  double x = 0.005;
  double y = 0.0005;
  double alpha = 1.5;
  std::vector<double> lambdas{0.1, 1.0, 10.0};
  int horizon = 5;
  std::size_t runs = 2000;
  std::size_t seeds_per_cascade = 1;
  std::uint64_t seed = 1;
};

struct BoundCheckRow {
  double lambda = 0.0;
  MgfBound bound;
  double extinction = 0.0;
  double extinction_se = 0.0;
  bool holds = false;  // extinction <= bound + 2 combined standard errors
};

struct BoundCheckResult {
  std::size_t runs = 0;
  std::size_t qualifying = 0;  // every executed step up to the horizon took the LP branch
  std::vector<BoundCheckRow> rows;
};

inline BoundCheckResult run_bound_check(const BoundCheckConfig& cfg) {
  auto partition = share(Partition::from_sizes(cfg.partition_sizes));
  auto [bp, bm] = synthetic_matrices(cfg.base, cfg.x, cfg.y);
  const ContentModelPair models{SbmModel(partition, std::move(bp)), SbmModel(partition, std::move(bm))};
  ControlConfig control;
  control.alpha = cfg.alpha;
  control.max_steps = static_cast<std::size_t>(cfg.horizon);
  std::vector<std::optional<double>> front_at_T(cfg.runs);
  parallel_for(cfg.runs, [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, r));
    const auto seeds = draw_seeds(partition->num_nodes(), cfg.seeds_per_cascade, rng);
    const auto run = run_algorithm2(models, models.g_plus, seeds, control, rng);
    for (const auto& rep : run.reports)
      if (rep.branch != Branch::kLp) return;
    // front is absorbing at zero, so |I_T| = 0 iff the front died by T
    const auto sizes = run.cascade.front_sizes();
    front_at_T[r] = sizes.size() > static_cast<std::size_t>(cfg.horizon)
                        ? static_cast<double>(sizes[static_cast<std::size_t>(cfg.horizon)])
                        : 0.0;
  });
  std::vector<double> samples;
  for (const auto& f : front_at_T)
    if (f) samples.push_back(*f);
  BoundCheckResult out{cfg.runs, samples.size(), {}};
  if (samples.empty()) return out;
  std::vector<double> extinct;
  for (double s : samples) extinct.push_back(s == 0.0 ? 1.0 : 0.0);
  const auto [p_hat, p_se] = detail::mean_and_se(extinct);
  for (double lambda : cfg.lambdas) {
    BoundCheckRow row;
    row.lambda = lambda;
    row.bound = lemma1_bound(samples, cfg.alpha, lambda, cfg.horizon);
    row.extinction = p_hat;
    row.extinction_se = p_se;
    row.holds = p_hat <= row.bound.bound + 2.0 * std::hypot(row.bound.std_error, p_se);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace misinfo

#endif  // MISINFO_HARNESS_HPP_
