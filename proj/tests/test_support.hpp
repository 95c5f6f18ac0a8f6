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

// Helpers shared by the unit and acceptance tests.

#ifndef TREEAGG_TESTS_TEST_SUPPORT_HPP_
#define TREEAGG_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "treeagg.hpp"

namespace treeagg::testing {

inline constexpr std::uint32_t kRandomTreeBins = 8;

// A tree with `leaves` leaves grown by splitting uniformly chosen leaves on
// random features of a matrix with `d` columns of kRandomTreeBins bins each.
// Stats are random itb tallies; losses are random and nonnegative.
inline Tree random_tree(std::mt19937_64& gen, const LabelSpec& spec,
                        std::size_t leaves, std::size_t d = 3,
                        double max_loss = 20.0) {
  Tree tree(spec);
  tree.add_node(kNoNode);
  std::uniform_int_distribution<std::uint32_t> feat(0, d - 1);
  std::uniform_int_distribution<std::uint32_t> thr(0, kRandomTreeBins - 2);
  std::bernoulli_distribution coin(0.5);
  while (tree.n_leaves() < leaves) {
    std::vector<std::uint32_t> open;
    for (std::uint32_t v = 0; v < tree.size(); ++v) {
      if (tree.node(v).is_leaf()) open.push_back(v);
    }
    const auto v = open[std::uniform_int_distribution<std::size_t>(
        0, open.size() - 1)(gen)];
    Split s;
    s.feature = feat(gen);
    if (coin(gen)) {
      s.kind = FeatureKind::kContinuous;
      s.threshold = thr(gen);
      for (std::uint32_t b = 0; b <= s.threshold; ++b) s.left_bins.set(b);
    } else {
      s.kind = FeatureKind::kCategorical;
      do {
        s.left_bins.reset();
        for (std::uint32_t b = 0; b < kRandomTreeBins; ++b) {
          if (coin(gen)) s.left_bins.set(b);
        }
      } while (s.left_bins.none() || s.left_bins.count() == kRandomTreeBins);
    }
    tree.split_node(v, s);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t v = 0; v < tree.size(); ++v) {
    auto st = tree.stats(v);
    if (spec.task == Task::kClassification) {
      for (auto& c : st) c = std::floor(unit(gen) * 6.0);
      st[0] += 1.0;
    } else {
      const int n = 1 + static_cast<int>(unit(gen) * 5);
      for (int i = 0; i < n; ++i) {
        const double y = 4.0 * unit(gen) - 2.0;
        spec.accumulate(st, y, 1.0);
      }
    }
    auto& node = tree.node(v);
    node.loss = max_loss * unit(gen) * unit(gen);
    node.itb_weight = spec.weight(st);
    node.n_oob = 1;
  }
  return tree;
}

inline std::vector<std::uint8_t> random_row(std::mt19937_64& gen,
                                            std::size_t d = 3) {
  std::vector<std::uint8_t> row(d);
  std::uniform_int_distribution<int> bin(0, kRandomTreeBins - 1);
  for (auto& b : row) b = static_cast<std::uint8_t>(bin(gen));
  return row;
}

// Complete binary tree of the given depth, splitting feature `depth` of the
// node at each level on bin threshold 0.
inline Tree complete_tree(std::size_t depth, const LabelSpec& spec = {}) {
  Tree tree(spec);
  tree.add_node(kNoNode);
  std::vector<std::uint32_t> level = {0};
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<std::uint32_t> next;
    for (auto v : level) {
      Split s;
      s.feature = static_cast<std::uint32_t>(k);
      s.left_bins.set(0);
      tree.split_node(v, s);
      next.push_back(tree.node(v).left);
      next.push_back(tree.node(v).right);
    }
    level = std::move(next);
  }
  for (std::size_t v = 0; v < tree.size(); ++v) tree.stats(v)[0] = 1.0;
  return tree;
}

struct BinnedData {
  BinnedMatrix binned;
  std::vector<FeatureBins> bins;
  std::vector<double> labels;
};

// Random binned data with `d` continuous features of `b` bins; labels depend
// on the first feature plus noise.
inline BinnedData random_binned(std::mt19937_64& gen, std::size_t n,
                                std::size_t d, std::uint32_t b,
                                const LabelSpec& spec) {
  BinnedData out;
  out.binned = BinnedMatrix(n, d);
  FeatureBins fb;
  fb.n_bins = b;
  for (std::uint32_t t = 0; t + 1 < b; ++t) fb.thresholds.push_back(t + 0.5);
  out.bins.assign(d, fb);
  std::uniform_int_distribution<int> bin(0, static_cast<int>(b) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out.binned.at(i, j) = static_cast<std::uint8_t>(bin(gen));
    }
    const double x = static_cast<double>(out.binned.at(i, 0)) / b;
    if (spec.task == Task::kClassification) {
      const auto k = spec.n_classes;
      auto c = static_cast<std::size_t>(x * static_cast<double>(k));
      if (unit(gen) < 0.3) c = static_cast<std::size_t>(unit(gen) * k);
      out.labels.push_back(static_cast<double>(std::min(c, k - 1)));
    } else {
      out.labels.push_back(std::sin(6.0 * x) + 0.5 * (unit(gen) - 0.5));
    }
  }
  return out;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

}  // namespace treeagg::testing

#endif  // TREEAGG_TESTS_TEST_SUPPORT_HPP_
