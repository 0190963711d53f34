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


#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "misinfo/controller.hpp"
#include "misinfo/harness.hpp"

namespace misinfo {
namespace {

BlockMatrix random_block(std::size_t k, double hi, Rng& rng) {
  std::uniform_real_distribution<double> b(0.0, hi);
  BlockMatrix m(k);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) m(u, v) = b(rng);
  return m;
}

void check_partition_of_nodes(const SirState& s) {
  const std::size_t n = s.partition().num_nodes();
  const auto sus = s.susceptible(), rem = s.removed();
  const auto& inf = s.infected();
  EXPECT_EQ(sus.size() + inf.size() + rem.size(), n);
  std::set<NodeId> all(sus.begin(), sus.end());
  all.insert(inf.begin(), inf.end());
  all.insert(rem.begin(), rem.end());
  EXPECT_EQ(all.size(), n);
  EXPECT_EQ(s.num_susceptible(), sus.size());
  EXPECT_EQ(s.num_removed(), rem.size());
  const auto counts = class_counts(s.partition(), inf);
  EXPECT_EQ(counts, s.infected_counts());
}

class SirInvariantTest : public ::testing::TestWithParam<int> {};

TEST_P(SirInvariantTest, StatesPartitionTheNodesAtEveryStep) {
  const int period = GetParam();
  Rng rng(derive_seed(31, static_cast<std::uint64_t>(period)));
  for (int trial = 0; trial < 20; ++trial) {
    const SbmModel m(share(Partition::from_sizes({120, 80, 40})), random_block(3, 0.03, rng));
    SirState s(m.partition_ptr(), draw_seeds(240, 5, rng), period);
    std::vector<NodeId> removed_before = s.removed();
    bool was_terminal = false;
    for (int step = 0; step < 300; ++step) {
      check_partition_of_nodes(s);
      if (was_terminal) {
        EXPECT_TRUE(s.terminal());
      }
      was_terminal = s.terminal();
      s = sir_step(std::move(s), m, rng);
      const auto removed_now = s.removed();
      EXPECT_TRUE(std::includes(removed_now.begin(), removed_now.end(), removed_before.begin(),
                                removed_before.end()));
      removed_before = removed_now;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Periods, SirInvariantTest, ::testing::Values(1, 2, 4));

TEST(PropertyTest, ClassCountsSumToNodeCount) {
  Rng rng(3);
  const auto p = Partition::from_sizes({7, 1, 12});
  for (int trial = 0; trial < 50; ++trial) {
    const auto nodes = draw_seeds(20, std::uniform_int_distribution<std::size_t>(0, 20)(rng), rng);
    const auto c = class_counts(p, nodes);
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::size_t{0}), nodes.size());
  }
}

TEST(PropertyTest, RaisingBlockEntriesNeverShrinksCoupledCascades) {
  Rng rng(41);
  auto part = share(Partition::from_sizes({150, 100}));
  for (int trial = 0; trial < 40; ++trial) {
    const BlockMatrix low = random_block(2, 0.012, rng);
    BlockMatrix high = low;
    std::uniform_int_distribution<std::size_t> pick(0, 1);
    const std::size_t u = pick(rng), v = pick(rng);
    high(u, v) = std::min(1.0, high(u, v) + std::uniform_real_distribution<double>(0, 0.02)(rng));
    const auto seeds = draw_seeds(250, 3, rng);
    const std::uint64_t key = rng();
    Rng unused(0);
    const auto a = run_cascade_with(part, CoupledTransmission{low, key}, seeds, 1, unused);
    const auto b = run_cascade_with(part, CoupledTransmission{high, key}, seeds, 1, unused);
    EXPECT_LE(a.r_infinity, b.r_infinity) << "trial " << trial;
  }
}

TEST(PropertyTest, ControlledNeverExceedsUncontrolledUnderCoupling) {
  auto part = share(Partition::from_sizes({300, 200}));
  for (double x : {0.0, 0.005, 0.01}) {
    auto [bp, bm] = synthetic_matrices(default_base_matrix(2), x, 0.0005);
    const ContentModelPair models{SbmModel(part, std::move(bp)), SbmModel(part, std::move(bm))};
    for (const SbmModel* real : {&models.g_plus, &models.g_minus}) {
      for (std::uint64_t trial = 0; trial < 15; ++trial) {
        Rng rng(derive_seed(5, trial));
        const auto seeds = draw_seeds(500, 5, rng);
        const std::uint64_t key = derive_seed(6, trial);
        ControlConfig cfg;
        const auto controlled = run_controlled(models, part, seeds, cfg, rng, simulate_coupled_on(*real, key));
        const auto free = run_cascade_with(part, CoupledTransmission{real->block(), key}, seeds, 1, rng);
        EXPECT_LE(controlled.cascade.r_infinity, free.r_infinity);
      }
    }
  }
}

TEST(PropertyTest, LpSolutionsAreFeasibleBoxPoints) {
  Rng rng(55);
  std::uniform_real_distribution<double> b(0.0, 0.02), s(0.0, 1000.0), f(0.0, 1.0);
  std::uniform_int_distribution<int> i(0, 10);
  std::uniform_int_distribution<std::size_t> kk(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = kk(rng);
    std::vector<double> sv(k), iv(k);
    for (std::size_t u = 0; u < k; ++u) {
      sv[u] = std::floor(s(rng));
      iv[u] = i(rng);
    }
    const auto c = StepCounts::make(sv, iv);
    const auto bp = random_block(k, 0.02, rng), bm = random_block(k, 0.02, rng);
    if (c.i_total == 0) continue;
    const double alpha =
        f(rng) * expected_next_infected_linear(c, bp, DropoutMatrix::ones(k)) / c.i_total;
    const auto r = solve_lp(c, bm, bp, alpha);
    EXPECT_TRUE(r.d_star.matrix().all_within(0.0, 1.0));
    EXPECT_GE(r.constraint_value, alpha * c.i_total - 1e-9);
    // no cheaper point on the segment towards zero stays feasible
    EXPECT_LE(r.objective, expected_next_infected_linear(c, bm, DropoutMatrix::ones(k)) + 1e-12);
  }
}

TEST(PropertyTest, DropoutIsMonotone) {
  Rng rng(61);
  auto part = share(Partition::from_sizes({10, 10}));
  for (int trial = 0; trial < 50; ++trial) {
    const SbmModel m(part, random_block(2, 0.5, rng));
    const BlockMatrix lo = random_block(2, 0.5, rng);
    BlockMatrix hi = lo;
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t v = 0; v < 2; ++v) hi(u, v) += 0.5;
    const auto a = apply_dropout(m, DropoutMatrix(lo)).block();
    const auto b = apply_dropout(m, DropoutMatrix(hi)).block();
    const auto c = StepCounts::make({9, 8}, {1, 2});
    for (std::size_t u = 0; u < 2; ++u)
      for (std::size_t v = 0; v < 2; ++v) EXPECT_LE(a(u, v), b(u, v));
    EXPECT_LE(expected_next_infected_asymptotic(c, m.block(), DropoutMatrix(lo)),
              expected_next_infected_asymptotic(c, m.block(), DropoutMatrix(hi)));
  }
}

TEST(PropertyTest, SweepOutputIsDeterministic) {
  SyntheticConfig cfg;
  cfg.partition_sizes = {100, 100};
  cfg.x.points = 4;
  cfg.y.points = 3;
  cfg.trials_per_cell = 3;
  cfg.control = ControlConfig{};
  const auto a = run_sweep(cfg), b = run_sweep(cfg);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].true_stats.mean_size, b.cells[i].true_stats.mean_size);
    EXPECT_EQ(a.cells[i].false_stats.low_fraction, b.cells[i].false_stats.low_fraction);
  }
}

}  // namespace
}  // namespace misinfo
