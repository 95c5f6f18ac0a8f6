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

#include <numeric>
#include <random>

#include "test_support.hpp"
#include "treeagg/aggregation.hpp"
#include "treeagg/grower.hpp"

namespace treeagg {
namespace {

const LabelSpec kBinary{Task::kClassification, 2};

struct Grown {
  testing::BinnedData data;
  BootstrapSample sample;
  Tree tree;
};

Grown grow(std::uint64_t seed, const LabelSpec& spec, std::size_t n,
           GrowConfig config = {}) {
  std::mt19937_64 gen(seed);
  Grown g;
  g.data = testing::random_binned(gen, n, 4, 8, spec);
  const RandomSource rng{seed, 0};
  g.sample = bootstrap(n, rng);
  if (spec.task == Task::kRegression) config.criterion = Criterion::kVariance;
  g.tree = grow_tree(g.data.binned, g.data.bins, g.data.labels, spec, g.sample,
                     config, rng);
  return g;
}

TEST(TreeGrowth, SeparableClustersGiveOneSplit) {
  const std::size_t n = 60;
  BinnedMatrix m(n, 1);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i < n / 2 ? 0.0 : 1.0;
    m.at(i, 0) = i < n / 2 ? 1 : 6;
  }
  FeatureBins fb;
  fb.n_bins = 8;
  for (int t = 0; t < 7; ++t) fb.thresholds.push_back(t + 0.5);
  const std::vector<FeatureBins> bins = {fb};
  const RandomSource rng{1, 0};
  auto sample = bootstrap(n, rng);
  auto tree = grow_tree(m, bins, y, kBinary, sample, GrowConfig{}, rng);
  ASSERT_EQ(tree.size(), 3u);
  EXPECT_EQ(tree.max_depth(), 1u);
  for (auto v : {tree.node(0).left, tree.node(0).right}) {
    auto s = tree.stats(v);
    EXPECT_TRUE(s[0] == 0.0 || s[1] == 0.0);
  }
}

TEST(TreeGrowth, ConstantLabelsGiveSingleNode) {
  std::mt19937_64 gen(2);
  auto data = testing::random_binned(gen, 100, 3, 8, kBinary);
  std::fill(data.labels.begin(), data.labels.end(), 1.0);
  const RandomSource rng{2, 0};
  auto tree = grow_tree(data.binned, data.bins, data.labels, kBinary,
                        bootstrap(100, rng), GrowConfig{}, rng);
  EXPECT_EQ(tree.size(), 1u);

  const LabelSpec reg{Task::kRegression, 0};
  std::fill(data.labels.begin(), data.labels.end(), 0.1);
  GrowConfig config;
  config.criterion = Criterion::kVariance;
  auto rtree = grow_tree(data.binned, data.bins, data.labels, reg,
                         bootstrap(100, rng), config, rng);
  EXPECT_EQ(rtree.size(), 1u);
}

void check_structure(const Grown& g, const LabelSpec& spec,
                     const GrowConfig& config) {
  const auto& tree = g.tree;
  const auto& sample = g.sample;
  std::vector<std::uint32_t> itb_count(tree.size(), 0), oob_count(tree.size(), 0);
  std::vector<double> itb_weight(tree.size(), 0.0);
  for (auto i : sample.itb_indices) {
    for (auto v : tree.path(g.data.binned.row(i))) {
      ++itb_count[v];
      itb_weight[v] += sample.itb_weights[i];
    }
  }
  for (auto i : sample.oob_indices) {
    for (auto v : tree.path(g.data.binned.row(i))) ++oob_count[v];
  }
  std::size_t leaf_itb = 0, leaf_oob = 0;
  for (std::uint32_t v = 0; v < tree.size(); ++v) {
    const auto& n = tree.node(v);
    EXPECT_EQ(n.n_itb, itb_count[v]);
    EXPECT_EQ(n.n_oob, oob_count[v]);
    EXPECT_EQ(n.itb_weight, itb_weight[v]);
    EXPECT_GE(n.itb_weight, config.min_samples_leaf);
    if (config.use_oob) {
      EXPECT_GE(n.n_oob, config.min_samples_leaf);
    }
    if (n.is_leaf()) {
      leaf_itb += n.n_itb;
      leaf_oob += n.n_oob;
      continue;
    }
    EXPECT_GT(n.left, v);
    EXPECT_GT(n.right, v);
    EXPECT_EQ(tree.node(n.left).parent, v);
    EXPECT_EQ(tree.node(n.right).parent, v);
    EXPECT_EQ(tree.node(n.left).depth, n.depth + 1);
    // Additivity of the label statistics.
    for (std::size_t k = 0; k < spec.width(); ++k) {
      EXPECT_NEAR(tree.stats(v)[k],
                  tree.stats(n.left)[k] + tree.stats(n.right)[k],
                  1e-9 * (1.0 + std::abs(tree.stats(v)[k])));
    }
    // Every accepted split strictly decreases impurity.
    const double wl = tree.node(n.left).itb_weight;
    const double wr = tree.node(n.right).itb_weight;
    const double children =
        (wl * impurity(tree.stats(n.left), spec, config.criterion) +
         wr * impurity(tree.stats(n.right), spec, config.criterion)) /
        (wl + wr);
    EXPECT_GT(impurity(tree.stats(v), spec, config.criterion) - children,
              -1e-12);
    if (config.max_depth) {
      EXPECT_LT(n.depth, *config.max_depth);
    }
  }
  EXPECT_EQ(leaf_itb, sample.itb_indices.size());
  EXPECT_EQ(leaf_oob, sample.oob_indices.size());
}

TEST(TreeGrowthProperty, StructureOnRandomData) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (auto spec : {LabelSpec{Task::kClassification, 2},
                      LabelSpec{Task::kClassification, 4},
                      LabelSpec{Task::kRegression, 0}}) {
      GrowConfig config;
      if (spec.task == Task::kRegression) config.criterion = Criterion::kVariance;
      else if (seed % 2) config.criterion = Criterion::kEntropy;
      if (seed % 3 == 0) config.min_samples_leaf = 3;
      if (seed % 5 == 0) config.max_depth = 3;
      if (seed % 7 == 0) config.max_features = 4;
      auto g = grow(seed, spec, 150 + seed * 5, config);
      EXPECT_GT(g.tree.size(), 1u);
      check_structure(g, spec, config);
    }
  }
}

TEST(TreeGrowthProperty, LossesMatchRecomputation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto spec = seed % 2 ? LabelSpec{Task::kRegression, 0} : kBinary;
    auto g = grow(seed, spec, 200);
    Tree copy = g.tree;
    compute_node_losses(copy, g.data.binned, g.data.labels,
                        g.sample.oob_indices);
    for (std::size_t v = 0; v < copy.size(); ++v) {
      EXPECT_NEAR(copy.node(v).loss, g.tree.node(v).loss,
                  1e-9 * (1.0 + copy.node(v).loss));
      EXPECT_EQ(copy.node(v).n_oob, g.tree.node(v).n_oob);
    }
  }
}

TEST(TreeGrowth, DeterministicForFixedSeed) {
  auto a = grow(7, kBinary, 300);
  auto b = grow(7, kBinary, 300);
  EXPECT_EQ(a.tree, b.tree);
}

TEST(TreeGrowth, WithoutOutOfBagConstraintLeavesMayLackOutOfBagRows) {
  GrowConfig config;
  config.use_oob = false;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 20 && !found; ++seed) {
    auto g = grow(seed, kBinary, 200, config);
    for (auto& n : g.tree.nodes()) found = found || n.n_oob == 0;
    check_structure(g, kBinary, config);
  }
  EXPECT_TRUE(found);
}

TEST(TreeGrowth, StarvedRootBecomesLeaf) {
  BinnedMatrix m(3, 1);
  m.at(1, 0) = 1;
  m.at(2, 0) = 2;
  const std::vector<double> y = {0, 1, 1};
  FeatureBins fb;
  fb.n_bins = 3;
  fb.thresholds = {0.5, 1.5};
  const std::vector<FeatureBins> bins = {fb};
  const std::vector<std::size_t> draws = {0, 1, 1};
  auto sample = bootstrap_from_draws(3, draws);
  GrowReport report;
  auto tree = grow_tree(m, bins, y, kBinary, sample, GrowConfig{},
                        RandomSource{}, &report);
  EXPECT_EQ(tree.size(), 1u);
  EXPECT_TRUE(report.root_oob_starved);
}

TEST(TreeGrowth, RejectsMismatchedShapes) {
  std::mt19937_64 gen(1);
  auto data = testing::random_binned(gen, 50, 2, 4, kBinary);
  auto sample = bootstrap(50, RandomSource{});
  std::vector<double> short_labels(10, 0.0);
  EXPECT_ANY_THROW(grow_tree(data.binned, data.bins, short_labels, kBinary,
                             sample, GrowConfig{}, RandomSource{}));
  GrowConfig config;
  config.max_features = 3;
  EXPECT_THROW(grow_tree(data.binned, data.bins, data.labels, kBinary, sample,
                         config, RandomSource{}),
               ConfigError);
}

}  // namespace
}  // namespace treeagg
