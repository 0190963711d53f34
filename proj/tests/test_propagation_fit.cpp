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
#include <cmath>

#include "misinfo/harness.hpp"
#include "misinfo/propagation_fit.hpp"

namespace misinfo {
namespace {

TEST(BuildBlockMatricesTest, UnitReshareRatesCopyTransfer) {
  auto part = share(Partition::from_sizes({2, 3}));
  const auto c = BlockMatrix::from_rows({{0.3, 0.1}, {0.2, 0.4}});
  const UserParams users{std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)};
  const auto pair = build_block_matrices(users, {c, c}, part);
  EXPECT_EQ(pair.g_plus.block(), c);
  EXPECT_EQ(pair.g_minus.block(), c);
}

TEST(BuildBlockMatricesTest, ZeroFalseRatesGiveZeroFalseBlock) {
  auto part = share(Partition::from_sizes({2, 3}));
  const auto c = BlockMatrix::from_rows({{0.3, 0.1}, {0.2, 0.4}});
  const UserParams users{std::vector<double>(5, 0.5), std::vector<double>(5, 0.0)};
  const auto pair = build_block_matrices(users, {c, c}, part);
  EXPECT_EQ(pair.g_minus.block(), BlockMatrix(2, 0.0));
}

TEST(BuildBlockMatricesTest, ClassAverageTimesTransfer) {
  auto part = share(Partition::from_sizes({2}));
  const UserParams users{{1.0, 1.0}, {0.2, 0.4}};
  const ClassTransfer t{BlockMatrix(1, 0.5), BlockMatrix(1, 0.5)};
  EXPECT_NEAR(build_block_matrices(users, t, part).g_minus.block()(0, 0), 0.15, 1e-15);
}

TEST(BuildBlockMatricesTest, RejectsBadDimensions) {
  auto part = share(Partition::from_sizes({2, 3}));
  const UserParams users{std::vector<double>(4, 1.0), std::vector<double>(5, 1.0)};
  EXPECT_THROW(build_block_matrices(users, {BlockMatrix(2), BlockMatrix(2)}, part), InvalidArgument);
  const UserParams ok{std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)};
  EXPECT_THROW(build_block_matrices(ok, {BlockMatrix(3), BlockMatrix(2)}, part), InvalidArgument);
}

TEST(EchoChamberTest, FlagsOutwardHeavyRows) {
  const ClassTransfer t{BlockMatrix::from_rows({{0.1, 0.2}, {0.0, 0.3}}), BlockMatrix(2, 0.1)};
  const auto w = echo_chamber_warnings(t);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("c_plus(0,0)"), std::string::npos);
}

TEST(EstimateTest, AllExposuresSucceed) {
  auto part = share(Partition::from_sizes({4}));
  const SbmModel certain(part, BlockMatrix(1, 1.0));
  Rng rng(2);
  std::vector<LabeledCascade> data;
  data.push_back({run_cascade_traced(certain, std::vector<NodeId>{0}, 1, rng), ContentLabel::kFalse});
  data.push_back({run_cascade_traced(certain, std::vector<NodeId>{1}, 1, rng), ContentLabel::kTrue});
  const auto est = estimate_block_matrices(data, part);
  EXPECT_DOUBLE_EQ(est.models.g_minus.block()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(est.minus.opportunities(0, 0), 3.0);
}

TEST(EstimateTest, MissingLabelsAreReported) {
  auto part = share(Partition::from_sizes({4}));
  EXPECT_THROW(estimate_block_matrices(std::vector<LabeledCascade>{}, part), InsufficientDataError);
  std::vector<LabeledCascade> only_true{{CascadeRecord{{0}, {{1}, {0}}, 1, 1, {}}, ContentLabel::kTrue}};
  try {
    estimate_block_matrices(only_true, part);
    FAIL() << "expected InsufficientDataError";
  } catch (const InsufficientDataError& e) {
    EXPECT_NE(std::string(e.what()).find("'false'"), std::string::npos);
  }
}

TEST(EstimateTest, UnobservedPairsAreZeroAndFlagged) {
  auto part = share(Partition::from_sizes({2, 2}));
  // Only class 0 is ever infected, so (1, *) has no opportunities.
  const CascadeRecord rec{{0}, {{1, 0}, {0, 0}}, 1, 1, {}};
  const std::vector<LabeledCascade> data{{rec, ContentLabel::kTrue}, {rec, ContentLabel::kFalse}};
  const auto est = estimate_block_matrices(data, part);
  EXPECT_EQ(est.unobserved_minus.size(), 2u);
  EXPECT_EQ(est.models.g_minus.block()(1, 0), 0.0);
  EXPECT_EQ(est.models.g_minus.block()(0, 1), 0.0);
  EXPECT_EQ(est.minus.opportunities(0, 1), 2.0);
}

TEST(EstimateTest, ProportionalSplitWithoutTransferLog) {
  auto part = share(Partition::from_sizes({10, 10}));
  // I_0 = (2, 2), I_1 = (0, 4), S_0 = (8, 8)
  const CascadeRecord rec{{0, 1, 10, 11}, {{2, 2}, {0, 4}, {0, 0}}, 8, 2, {}};
  ExposureTally tally(2);
  accumulate_exposures(rec, *part, tally);
  EXPECT_DOUBLE_EQ(tally.successes(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(tally.successes(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(tally.successes(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(tally.opportunities(0, 0), 16.0);
  // step 1: S = (8, 4), I = (0, 4)
  EXPECT_DOUBLE_EQ(tally.opportunities(1, 1), 16.0 + 16.0);
  EXPECT_DOUBLE_EQ(tally.opportunities(1, 0), 16.0 + 32.0);
}

TEST(EstimateTest, PseudoCountSmooths) {
  ExposureTally t(1);
  t.opportunities(0, 0) = 8.0;
  t.successes(0, 0) = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> un;
  EXPECT_DOUBLE_EQ(estimate_from_tally(t, {1.0}, un)(0, 0), 0.1);
  EXPECT_TRUE(un.empty());
}

TEST(EstimateTest, RecoversGeneratingMatrices) {
  GeneratorConfig cfg;
  cfg.partition_sizes = {500, 500};
  cfg.x = 0.0;
  cfg.y = 0.0;
  cfg.cascades = 1000;  // 500 per label
  const auto data = generate_dataset(cfg);
  const auto est = estimate_block_matrices(data.cascades, data.partition);
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t v = 0; v < 2; ++v) {
      const double truth = data.truth.g_minus.block()(u, v);
      EXPECT_NEAR(est.models.g_minus.block()(u, v), truth, 0.2 * truth) << u << "," << v;
    }
}

double estimation_error(std::size_t cascades, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.partition_sizes = {100, 100};
  cfg.base = BlockMatrix::from_rows({{0.02, 0.008}, {0.008, 0.02}});
  cfg.x = cfg.y = 0.0;
  cfg.cascades = cascades;
  cfg.seeds_per_cascade = 2;
  cfg.seed = seed;
  const auto data = generate_dataset(cfg);
  const auto est = estimate_block_matrices(data.cascades, data.partition);
  double err = 0.0;
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t v = 0; v < 2; ++v)
      err += std::abs(est.models.g_minus.block()(u, v) - data.truth.g_minus.block()(u, v));
  return err;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

TEST(EstimateTest, ErrorShrinksWithMoreCascades) {
  std::vector<double> small, large;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    small.push_back(estimation_error(40, 100 + rep));
    large.push_back(estimation_error(80, 200 + rep));
  }
  EXPECT_LE(median(large), median(small));
}

TEST(MergeTest, SmallClassesFoldIntoResidual) {
  std::vector<std::size_t> sizes{990, 5, 5};
  const auto m = merge_small_partitions(Partition::from_sizes(sizes), 0.01);
  EXPECT_EQ(m.partition.sizes(), (std::vector<std::size_t>{990, 10}));
  EXPECT_EQ(m.remap, (std::vector<ClassIndex>{0, 1, 1}));
}

TEST(MergeTest, ResidualGoesLastAndOrderIsKept) {
  const auto m = merge_small_partitions(Partition::from_sizes({3, 500, 2, 495}), 0.01);
  EXPECT_EQ(m.partition.sizes(), (std::vector<std::size_t>{500, 495, 5}));
  EXPECT_EQ(m.remap, (std::vector<ClassIndex>{2, 0, 2, 1}));
  EXPECT_EQ(m.partition.num_nodes(), 1000u);
  EXPECT_EQ(m.partition.class_of(0), 2u);
  EXPECT_EQ(m.partition.class_of(3), 0u);
}

TEST(MergeTest, IdentityWhenNothingIsSmall) {
  const auto p = Partition::from_sizes({500, 500});
  const auto m = merge_small_partitions(p, 0.01);
  EXPECT_EQ(m.partition, p);
  EXPECT_EQ(m.remap, (std::vector<ClassIndex>{0, 1}));
  const auto single = Partition::from_sizes({7});
  EXPECT_EQ(merge_small_partitions(single, 0.5).partition, single);
}

TEST(MergeTest, RejectsThresholdOutsideUnitInterval) {
  const auto p = Partition::from_sizes({5});
  EXPECT_THROW(merge_small_partitions(p, 0.0), InvalidArgument);
  EXPECT_THROW(merge_small_partitions(p, 1.0), InvalidArgument);
}

TEST(RemapTest, SumsMergedClasses) {
  const CascadeRecord rec{{0}, {{1, 2, 3}, {0, 0, 0}}, 6, 1, {}};
  const std::vector<ClassIndex> remap{0, 1, 1};
  const auto out = remap_classes(rec, remap, 2);
  EXPECT_EQ(out.steps[0], (std::vector<std::size_t>{1, 5}));
}

}  // namespace
}  // namespace misinfo
