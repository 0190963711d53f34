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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "misinfo/io.hpp"
#include "misinfo/misinfo.hpp"
#include "oracles.hpp"

namespace misinfo {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Monte Carlo mean of |I_{t+1}| from a fixed state.
std::pair<double, double> next_front_mean(const SbmModel& m, std::span<const NodeId> infected, int trials,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    SirState s(m.partition_ptr(), infected);
    xs.push_back(static_cast<double>(sir_step(std::move(s), m, rng).num_infected()));
  }
  return detail::mean_and_se(xs);
}

Outcome expectation_oracle() {
  Outcome o;
  {
    const SbmModel m(share(Partition::from_sizes({1000})), BlockMatrix(1, 0.01));
    std::vector<NodeId> seeds(10);
    std::iota(seeds.begin(), seeds.end(), 0);
    const double exact = expected_next_infected_exact(StepCounts::make({990}, {10}), m.block(),
                                                      DropoutMatrix::ones(1));
    const auto [mean, se] = next_front_mean(m, seeds, 10000, 1);
    o.require(std::abs(mean - exact) <= 3 * se,
              "single class MC " + fmt(mean) + " vs exact " + fmt(exact));
    o.note("single class: MC " + fmt(mean, 6) + " exact " + fmt(exact, 6));
  }
  Rng rng(2);
  std::uniform_real_distribution<double> b(0.0, 0.01);
  std::uniform_int_distribution<std::size_t> size(200, 800), inf(1, 20);
  double worst_gap = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    auto part = share(Partition::from_sizes({size(rng), size(rng)}));
    const SbmModel m(part, BlockMatrix::from_rows({{b(rng), b(rng)}, {b(rng), b(rng)}}));
    const std::size_t i0 = inf(rng), i1 = inf(rng);
    std::vector<NodeId> infected;
    for (NodeId j = 0; j < i0; ++j) infected.push_back(j);
    for (std::size_t j = 0; j < i1; ++j) infected.push_back(static_cast<NodeId>(part->sizes()[0] + j));
    const auto counts = StepCounts::make({double(part->sizes()[0] - i0), double(part->sizes()[1] - i1)},
                                         {double(i0), double(i1)});
    const double exact = expected_next_infected_exact(counts, m.block(), DropoutMatrix::ones(2));
    const double approx = expected_next_infected_asymptotic(counts, m.block(), DropoutMatrix::ones(2));
    const auto [mean, se] = next_front_mean(m, infected, 10000, derive_seed(3, inst));
    o.require(std::abs(mean - exact) <= 3 * se, "2-class instance " + std::to_string(inst) + " MC " +
                                                    fmt(mean) + " vs exact " + fmt(exact));
    worst_gap = std::max(worst_gap, std::abs(approx - exact) / exact);
  }
  o.require(worst_gap <= 0.02, "exponential form off by " + fmt(worst_gap));
  o.note("10 two-class instances, worst exponential-form gap " + fmt(worst_gap));
  return o;
}

Outcome lp_oracle() {
  Outcome o;
  Rng rng(1234);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = testing::random_lp_instance(rng);
    const auto r = solve_lp(x.counts, x.b_minus, x.b_plus, x.alpha);
    const double oracle = testing::lp_grid_oracle(x);
    const double excess = oracle > 0 ? (r.objective - oracle) / oracle : r.objective;
    worst = std::max(worst, excess);
    o.require(r.objective <= oracle + 0.01 * std::abs(oracle) + 1e-12,
              "instance " + std::to_string(trial) + " objective above oracle");
    o.require(r.constraint_value >= x.alpha * x.counts.i_total - 1e-9,
              "instance " + std::to_string(trial) + " violates the constraint");
  }
  o.note("100 instances, worst relative excess over oracle " + fmt(worst));
  return o;
}

Outcome convex_closed_form() {
  Outcome o;
  const auto r = solve_convex(StepCounts::make({900}, {10}), BlockMatrix(1, 0.01), BlockMatrix(1, 0.01), 1.5);
  o.require(std::abs(r.d_star(0, 0) - 0.16807) <= 1e-4, "d = " + fmt(r.d_star(0, 0), 8));
  o.note("d = " + fmt(r.d_star(0, 0), 8));
  Rng rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = testing::synthetic_regime_instance(rng);
    const auto conv = solve_convex(x.counts, x.b_minus, x.b_plus, x.alpha);
    const auto lp = solve_lp(x.counts, x.b_minus, x.b_plus, x.alpha);
    const double gap = std::abs(conv.objective - lp.objective) / std::max(lp.objective, 1e-12);
    worst = std::max(worst, gap);
  }
  o.require(worst <= 0.05, "convex vs LP gap " + fmt(worst));
  o.note("50 small-|I| instances, worst convex/LP gap " + fmt(worst));
  return o;
}

SyntheticConfig sweep_config(std::string name, std::vector<std::size_t> sizes,
                             std::optional<ControlConfig> control) {
  SyntheticConfig c;
  c.name = std::move(name);
  c.partition_sizes = std::move(sizes);
  c.control = control;
  return c;
}

Outcome control_reproduction() {
  Outcome o;
  const auto s = collate(run_sweep(sweep_config("balanced-2", {500, 500}, std::nullopt)));
  o.require(std::abs(s.true_mean - 0.89) <= 0.15, "true mean " + fmt(s.true_mean));
  o.require(std::abs(s.false_mean - 0.98) <= 0.15, "false mean " + fmt(s.false_mean));
  o.note("true " + fmt(s.true_mean, 3) + " (0.89), false " + fmt(s.false_mean, 3) + " (0.98)");
  return o;
}

Outcome discrimination() {
  Outcome o;
  const auto control = run_sweep(sweep_config("unbalanced-2", {800, 200}, std::nullopt));
  const auto treated = run_sweep(sweep_config("unbalanced-2", {800, 200}, ControlConfig{}));
  const double reduction = max_false_reduction(control, treated);
  const auto s = collate(treated);
  o.require(reduction >= 0.6, "max false reduction " + fmt(reduction));
  o.require(s.true_mean > s.false_mean, "true mean not above false mean");
  o.require(s.false_low > s.true_low, "false low-cascade rate not above true");
  o.note("max reduction " + fmt(reduction, 3) + ", means true " + fmt(s.true_mean, 3) + " false " +
         fmt(s.false_mean, 3) + ", low true " + fmt(s.true_low, 3) + " false " + fmt(s.false_low, 3));
  return o;
}

Outcome extinction_bound() {
  Outcome o;
  BoundCheckConfig cfg;
  const auto r = run_bound_check(cfg);
  o.require(r.runs >= 2000, "fewer than 2000 runs");
  o.require(r.qualifying > 0, "no run stayed feasible");
  o.note(std::to_string(r.qualifying) + "/" + std::to_string(r.runs) + " runs feasible to T=" +
         std::to_string(cfg.horizon));
  for (const auto& row : r.rows) {
    o.require(row.holds, "lambda " + fmt(row.lambda) + " violated");
    o.note("lambda " + fmt(row.lambda) + ": extinction " + fmt(row.extinction, 3) + " <= bound " +
           fmt(row.bound.bound, 3));
  }
  return o;
}

Outcome pipeline() {
  Outcome o;
  GeneratorConfig g;
  const auto data = generate_dataset(g);
  const auto est = estimate_block_matrices(data.cascades, data.partition);
  double worst = 0.0;
  std::size_t checked = 0;
  auto check = [&](const BlockMatrix& truth, const BlockMatrix& fit, const ExposureTally& tally) {
    for (std::size_t u = 0; u < truth.size(); ++u)
      for (std::size_t v = 0; v < truth.size(); ++v) {
        if (tally.opportunities(u, v) < 20) continue;
        ++checked;
        worst = std::max(worst, std::abs(fit(u, v) - truth(u, v)) / truth(u, v));
      }
  };
  check(data.truth.g_plus.block(), est.models.g_plus.block(), est.plus);
  check(data.truth.g_minus.block(), est.models.g_minus.block(), est.minus);
  o.require(checked > 0 && worst <= 0.2, "worst relative estimation error " + fmt(worst));
  o.note(std::to_string(checked) + " entries, worst relative error " + fmt(worst, 3));

  PipelineOptions opts;
  const auto r = run_dataset_pipeline(*data.partition, data.cascades, {std::nullopt, ControlConfig{}}, opts);
  const double true_kept = r.rows[1].true_stats.mean_size / r.rows[0].true_stats.mean_size;
  const double false_kept = r.rows[1].false_stats.mean_size / r.rows[0].false_stats.mean_size;
  o.require(false_kept < true_kept, "false content not reduced more than true content");
  o.note("mean R_inf true " + fmt(r.rows[0].true_stats.mean_size) + " -> " +
         fmt(r.rows[1].true_stats.mean_size) + ", false " + fmt(r.rows[0].false_stats.mean_size) +
         " -> " + fmt(r.rows[1].false_stats.mean_size));
  return o;
}

Outcome properties() {
  Outcome o;
  Rng rng(7);
  std::uniform_real_distribution<double> b(0.0, 0.02);
  auto part = share(Partition::from_sizes({200, 100}));
  auto random_block = [&] { return BlockMatrix::from_rows({{b(rng), b(rng)}, {b(rng), b(rng)}}); };

  bool invariant = true;
  for (int trial = 0; trial < 50; ++trial) {
    const SbmModel m(part, random_block());
    SirState s(part, draw_seeds(300, 5, rng));
    for (;;) {
      std::set<NodeId> all;
      const auto sus = s.susceptible(), rem = s.removed();
      all.insert(sus.begin(), sus.end());
      all.insert(s.infected().begin(), s.infected().end());
      all.insert(rem.begin(), rem.end());
      invariant &= sus.size() + s.num_infected() + rem.size() == 300 && all.size() == 300;
      if (s.terminal()) break;
      s = sir_step(std::move(s), m, rng);
    }
  }
  o.require(invariant, "SIR sets do not partition the nodes");

  bool monotone = true;
  for (int trial = 0; trial < 100; ++trial) {
    const BlockMatrix low = random_block();
    BlockMatrix high = low;
    high(trial % 2, (trial / 2) % 2) += 0.01;
    const auto seeds = draw_seeds(300, 3, rng);
    const std::uint64_t key = rng();
    const auto a = run_cascade_with(part, CoupledTransmission{low, key}, seeds, 1, rng);
    const auto c = run_cascade_with(part, CoupledTransmission{high, key}, seeds, 1, rng);
    monotone &= a.r_infinity <= c.r_infinity;
  }
  o.require(monotone, "coupled cascades not monotone in block entries");

  bool dominated = true;
  auto [bp, bm] = synthetic_matrices(default_base_matrix(2), 0.005, 0.0005);
  const ContentModelPair models{SbmModel(part, std::move(bp)), SbmModel(part, std::move(bm))};
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const SbmModel& real = trial % 2 ? models.g_plus : models.g_minus;
    const auto seeds = draw_seeds(300, 5, rng);
    const std::uint64_t key = derive_seed(8, trial);
    const auto controlled = run_controlled(models, part, seeds, {}, rng, simulate_coupled_on(real, key));
    const auto free = run_cascade_with(part, CoupledTransmission{real.block(), key}, seeds, 1, rng);
    dominated &= controlled.cascade.r_infinity <= free.r_infinity;
  }
  o.require(dominated, "controlled cascade exceeded its paired uncontrolled cascade");

  auto cfg = sweep_config("balanced-2", {500, 500}, ControlConfig{});
  cfg.x.points = cfg.y.points = 4;
  cfg.trials_per_cell = 5;
  const auto first = io::sweep_csv(run_sweep(cfg));
  cfg.threads = 1;
  const auto second = io::sweep_csv(run_sweep(cfg));
  o.require(first == second, "sweep output differs between runs");
  o.note("invariant, coupling, paired control and determinism checks");
  return o;
}

}  // namespace
}  // namespace misinfo

int main() {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::pair<const char*, std::function<misinfo::Outcome()>>> criteria{
      {"expectation formulas", misinfo::expectation_oracle},
      {"linear program oracle", misinfo::lp_oracle},
      {"convex closed form", misinfo::convex_closed_form},
      {"control sweep reproduction", misinfo::control_reproduction},
      {"false-content discrimination", misinfo::discrimination},
      {"extinction bound", misinfo::extinction_bound},
      {"dataset pipeline", misinfo::pipeline},
      {"property suite", misinfo::properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    misinfo::Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s %zu %s (%.1fs): %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
