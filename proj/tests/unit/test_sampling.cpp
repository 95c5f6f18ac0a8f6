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
#include <numeric>
#include <map>
#include <set>

#include "treeagg/sampling.hpp"

namespace treeagg {
namespace {

TEST(Sampling, TallyFromDraws) {
  const std::vector<std::size_t> draws = {1, 1, 1};
  auto s = bootstrap_from_draws(3, draws);
  EXPECT_EQ(s.itb_weights, (std::vector<std::uint32_t>{0, 3, 0}));
  EXPECT_EQ(s.itb_indices, (std::vector<std::size_t>{1}));
  EXPECT_EQ(s.oob_indices, (std::vector<std::size_t>{0, 2}));
}

TEST(Sampling, PartitionAndTotalWeight) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 2 + seed % 97;
    auto s = bootstrap(n, RandomSource{seed, seed * 3});
    EXPECT_EQ(std::accumulate(s.itb_weights.begin(), s.itb_weights.end(),
                              std::size_t{0}),
              n);
    std::vector<int> seen(n, 0);
    for (auto i : s.itb_indices) {
      ++seen[i];
      EXPECT_GE(s.itb_weights[i], 1u);
    }
    for (auto i : s.oob_indices) {
      ++seen[i];
      EXPECT_EQ(s.itb_weights[i], 0u);
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(),
                            [](int c) { return c == 1; }));
    EXPECT_FALSE(s.oob_indices.empty());
    EXPECT_FALSE(s.itb_indices.empty());
  }
}

TEST(Sampling, DeterministicPerSeedAndStream) {
  auto a = bootstrap(500, RandomSource{42, 7});
  auto b = bootstrap(500, RandomSource{42, 7});
  auto c = bootstrap(500, RandomSource{42, 8});
  EXPECT_EQ(a.itb_weights, b.itb_weights);
  EXPECT_NE(a.itb_weights, c.itb_weights);
}

TEST(Sampling, RejectsTinySamples) {
  EXPECT_THROW(bootstrap(1, RandomSource{}), ConfigError);
  EXPECT_THROW(bootstrap(0, RandomSource{}), ConfigError);
}

TEST(Sampling, SmallSamplesAlwaysHaveOutOfBagRows) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    auto s = bootstrap(2, RandomSource{seed, 0});
    EXPECT_EQ(s.oob_indices.size(), 1u);
  }
}

TEST(Sampling, InBagFractionNearTheLimit) {
  const std::size_t n = 1000;
  double total = 0.0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    total += static_cast<double>(
                 bootstrap(n, RandomSource{3, static_cast<std::uint64_t>(r)})
                     .itb_indices.size()) /
             n;
  }
  EXPECT_NEAR(total / reps, 0.632, 0.01);
}

TEST(Sampling, FeatureSubsets) {
  CounterEngine e(1, 2, Purpose::kFeatures, 3);
  auto all = subsample_features(10, 10, e);
  EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
  for (int r = 0; r < 100; ++r) {
    auto s = subsample_features(10, 3, e);
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 3u);
    for (auto j : s) EXPECT_LT(j, 10u);
  }
  EXPECT_THROW(subsample_features(10, 0, e), ConfigError);
  EXPECT_THROW(subsample_features(10, 11, e), ConfigError);
  EXPECT_EQ(default_max_features(49), 7u);
  EXPECT_EQ(default_max_features(50), 7u);
  EXPECT_EQ(default_max_features(1), 1u);
  EXPECT_EQ(default_max_features(3), 1u);
}

// Each of the C(5,2) subsets should come up about equally often.
TEST(Sampling, FeatureSubsetsAreUniform) {
  CounterEngine e(9, 0, Purpose::kFeatures, 0);
  std::map<std::vector<std::size_t>, int> counts;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) ++counts[subsample_features(5, 2, e)];
  EXPECT_EQ(counts.size(), 10u);
  for (auto& [subset, c] : counts) {
    EXPECT_NEAR(c / static_cast<double>(reps), 0.1, 0.015);
  }
}

TEST(Random, BoundedIsInRangeAndEngineIsStateless) {
  CounterEngine a(5, 1, Purpose::kSplit, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(a.bounded(7), 7u);
  CounterEngine b(5, 1, Purpose::kSplit, 0);
  CounterEngine c(5, 1, Purpose::kSplit, 0);
  for (int i = 0; i < 10; ++i) b();
  EXPECT_EQ(b(), c.at(10));
  const double u = c.uniform();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

}  // namespace
}  // namespace treeagg
