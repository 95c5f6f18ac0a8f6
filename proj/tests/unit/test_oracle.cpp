/*
 * Copyright 2026 The treeagg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "treeagg/grower.hpp"
#include "treeagg/oracle.hpp"

namespace treeagg {
namespace {

const LabelSpec kBinary{Task::kClassification, 2};

TEST(Enumeration, CompleteDepthTwoTree) {
  auto tree = testing::complete_tree(2);
  ASSERT_EQ(tree.size(), 7u);
  auto subtrees = enumerate_subtrees(tree);
  ASSERT_EQ(subtrees.size(), 5u);
  std::vector<std::uint32_t> c;
  for (auto& s : subtrees) c.push_back(s.complexity);
  std::sort(c.begin(), c.end());
  EXPECT_EQ(c, (std::vector<std::uint32_t>{1, 3, 3, 3, 3}));
  EXPECT_TRUE(prior_sums_to_one(subtrees));
}

TEST(Enumeration, SingleNode) {
  Tree tree(kBinary);
  tree.add_node(kNoNode);
  auto subtrees = enumerate_subtrees(tree);
  ASSERT_EQ(subtrees.size(), 1u);
  EXPECT_EQ(subtrees[0].complexity, 0u);
  EXPECT_TRUE(prior_sums_to_one(subtrees));
}

TEST(Enumeration, CountFollowsRecursion) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    auto tree = testing::random_tree(gen, kBinary, 1 + trial % 10);
    // N(v) = 1 for a leaf, 1 + N(left) N(right) otherwise.
    std::vector<std::uint64_t> n(tree.size());
    for (std::size_t v = tree.size(); v-- > 0;) {
      const auto& node = tree.node(v);
      n[v] = node.is_leaf() ? 1 : 1 + n[node.left] * n[node.right];
    }
    auto subtrees = enumerate_subtrees(tree);
    EXPECT_EQ(subtrees.size(), n[0]);
    EXPECT_EQ(count_subtrees(tree), n[0]);
    EXPECT_TRUE(prior_sums_to_one(subtrees));
    // Leaf sets are distinct and every subtree covers every root path.
    std::vector<std::vector<std::uint32_t>> leaves;
    for (auto s : subtrees) {
      std::sort(s.leaves.begin(), s.leaves.end());
      leaves.push_back(s.leaves);
    }
    std::sort(leaves.begin(), leaves.end());
    EXPECT_EQ(std::adjacent_find(leaves.begin(), leaves.end()), leaves.end());
  }
}

TEST(Enumeration, CompleteTreesUpToDepthFour) {
  for (std::size_t depth = 0; depth <= 4; ++depth) {
    auto tree = testing::complete_tree(depth);
    auto subtrees = enumerate_subtrees(tree, tree.size());
    EXPECT_TRUE(prior_sums_to_one(subtrees)) << "depth " << depth;
  }
  // 677 subtrees for depth 4: N(d) = 1 + N(d-1)^2.
  EXPECT_EQ(count_subtrees(testing::complete_tree(4)), 677u);
}

TEST(Enumeration, SizeGuard) {
  auto tree = testing::complete_tree(4);
  EXPECT_THROW(enumerate_subtrees(tree), ConfigError);
}

TEST(BruteForce, HugeRootLossDefersToLeaves) {
  auto tree = testing::complete_tree(1);
  tree.stats(0)[0] = 1; tree.stats(0)[1] = 9;
  tree.stats(1)[0] = 9; tree.stats(1)[1] = 1;
  tree.node(0).loss = 1e3;
  tree.node(1).loss = 0.0;
  tree.node(2).loss = 0.0;
  compute_log_weights(tree, 1.0);
  const std::vector<std::uint8_t> row = {0};
  auto slow = brute_force_aggregate(tree, row);
  auto leaf = predict_leaf_only(tree, row);
  EXPECT_NEAR(slow[0], leaf[0], 1e-6);
  EXPECT_NEAR(slow[1], leaf[1], 1e-6);
}

TEST(BruteForce, SingleNode) {
  Tree tree(kBinary);
  tree.add_node(kNoNode);
  tree.stats(0)[1] = 3;
  tree.node(0).loss = 2.0;
  compute_log_weights(tree, 1.0);
  const std::vector<std::uint8_t> row = {0};
  EXPECT_EQ(brute_force_aggregate(tree, row), predict_leaf_only(tree, row));
}

TEST(OracleInequality, SingleNodeIsTight) {
  std::mt19937_64 gen(2);
  auto data = testing::random_binned(gen, 40, 2, 4, kBinary);
  Tree tree(kBinary);
  tree.add_node(kNoNode);
  tree.stats(0)[0] = 5;
  tree.stats(0)[1] = 2;
  std::vector<std::size_t> oob(40);
  for (std::size_t i = 0; i < 40; ++i) oob[i] = i;
  compute_node_losses(tree, data.binned, data.labels, oob);
  compute_log_weights(tree, 1.0);
  auto report = check_oracle_inequality(tree, data.binned, data.labels, oob);
  EXPECT_EQ(report.n_subtrees, 1u);
  EXPECT_NEAR(report.max_violation, 0.0, 1e-12);
}

TEST(OracleInequality, HoldsOnGrownTrees) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const LabelSpec spec = seed % 2 ? LabelSpec{Task::kRegression, 0}
                                    : LabelSpec{Task::kClassification, 3};
    std::mt19937_64 gen(seed);
    auto data = testing::random_binned(gen, 80, 3, 6, spec);
    const RandomSource rng{seed, 1};
    auto sample = bootstrap(80, rng);
    GrowConfig config;
    config.max_depth = 3;
    config.max_features = 3;
    if (spec.task == Task::kRegression) config.criterion = Criterion::kVariance;
    auto tree = grow_tree(data.binned, data.bins, data.labels, spec, sample,
                          config, rng);
    double eta = 1.0;
    if (spec.task == Task::kRegression) {
      double b = 0.0;
      for (double y : data.labels) b = std::max(b, std::abs(y));
      eta = 1.0 / (8.0 * b * b);
    }
    compute_log_weights(tree, eta);
    auto report = check_oracle_inequality(tree, data.binned, data.labels,
                                          sample.oob_indices);
    EXPECT_LE(report.max_violation, 1e-9) << "seed " << seed;
    EXPECT_EQ(report.n_oob, sample.oob_indices.size());
  }
}

// Direct evaluation of the regret with the maximum likelihood distribution.
TEST(KrichevskyTrofimov, RegretBound) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 2 + trial % 9;
    std::vector<std::uint32_t> counts(k);
    for (auto& c : counts) c = static_cast<std::uint32_t>(gen() % 8);
    if (std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; })) {
      counts[0] = 1;
    }
    double n = 0.0;
    for (auto c : counts) n += c;
    double kt = 0.0, best = 0.0;
    for (auto c : counts) {
      if (c == 0) continue;
      kt -= c * std::log((c + 0.5) / (n + 0.5 * k));
      best -= c * std::log(c / n);
    }
    EXPECT_NEAR(kt_regret(counts), kt - best, 1e-9);
    EXPECT_LE(kt_regret(counts), (k - 1) / 2.0);
    EXPECT_GE(kt_regret(counts), 0.0);
  }
}

}  // namespace
}  // namespace treeagg
