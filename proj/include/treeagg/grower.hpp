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

#ifndef TREEAGG_GROWER_HPP_
#define TREEAGG_GROWER_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "treeagg/aggregation.hpp"
#include "treeagg/binning.hpp"
#include "treeagg/criteria.hpp"
#include "treeagg/histogram.hpp"
#include "treeagg/random.hpp"
#include "treeagg/sampling.hpp"
#include "treeagg/split.hpp"
#include "treeagg/tree.hpp"

namespace treeagg {

struct GrowConfig {
  Criterion criterion = Criterion::kGini;
  // Features tried per split; 0 selects floor(sqrt(d)).
  std::size_t max_features = 0;
  double min_samples_leaf = 1.0;
  double min_samples_split = 2.0;
  // A node whose impurity is <= this becomes a leaf.
  double min_impurity = 0.0;
  std::optional<std::uint32_t> max_depth;
  // Apply the sample-count requirements to out-of-bag rows as well. Needed
  // for aggregation; off reproduces a plain random forest tree.
  bool use_oob = true;
  double alpha = 0.5;
};

struct GrowReport {
  // The root had fewer than min_samples_split out-of-bag rows.
  bool root_oob_starved = false;
};

namespace detail {

class TreeGrower {
 public:
  TreeGrower(const BinnedMatrix& binned, std::span<const FeatureBins> bins,
             std::span<const double> labels, const LabelSpec& spec,
             const BootstrapSample& sample, const GrowConfig& config,
             const RandomSource& rng)
      : binned_(binned),
        bins_(bins),
        labels_(labels),
        spec_(spec),
        weights_(sample.itb_weights),
        config_(config),
        rng_(rng),
        itb_(sample.itb_indices),
        oob_(sample.oob_indices),
        tree_(spec) {
    n_bins_.reserve(bins.size());
    for (const auto& fb : bins) n_bins_.push_back(fb.n_bins);
    max_features_ = config.max_features == 0
                        ? default_max_features(bins.size())
                        : config.max_features;
    tree_.alpha = config.alpha;
  }

  Tree grow(GrowReport* report) && {
    const auto root = tree_.add_node(kNoNode);
    Pending p{root, 0, itb_.size(), 0, oob_.size(), {}, {}};
    finalize(p);
    p.itb_hist = compute_histogram(itb_span(p), weights_, binned_, n_bins_,
                                   labels_, spec_);
    if (config_.use_oob) {
      p.oob_hist = compute_count_histogram(oob_span(p), binned_, n_bins_);
      if (tree_.node(root).n_oob < config_.min_samples_split && report) {
        report->root_oob_starved = true;
      }
    }
    stack_.push_back(std::move(p));

    while (!stack_.empty()) {
      Pending node = std::move(stack_.back());
      stack_.pop_back();
      try_split(std::move(node));
    }
    return std::move(tree_);
  }

 private:
  struct Pending {
    std::uint32_t node;
    std::size_t itb_begin, itb_end, oob_begin, oob_end;
    Histogram itb_hist;
    Histogram oob_hist;
  };

  std::span<const std::size_t> itb_span(const Pending& p) const {
    return std::span<const std::size_t>(itb_).subspan(p.itb_begin,
                                                      p.itb_end - p.itb_begin);
  }
  std::span<const std::size_t> oob_span(const Pending& p) const {
    return std::span<const std::size_t>(oob_).subspan(p.oob_begin,
                                                      p.oob_end - p.oob_begin);
  }

  // Label statistics, counts and out-of-bag loss of a fresh node.
  void finalize(const Pending& p) {
    auto stats = tree_.stats(p.node);
    for (auto i : itb_span(p)) {
      spec_.accumulate(stats, labels_[i], static_cast<double>(weights_[i]));
    }
    auto& n = tree_.node(p.node);
    n.n_itb = static_cast<std::uint32_t>(p.itb_end - p.itb_begin);
    n.itb_weight = spec_.weight(stats);
    n.n_oob = static_cast<std::uint32_t>(p.oob_end - p.oob_begin);
    std::vector<double> forecast(spec_.output_width());
    node_forecast(stats, spec_, config_.alpha, forecast);
    n.loss = 0.0;
    for (auto i : oob_span(p)) {
      n.loss += sample_loss(forecast, labels_[i], spec_);
    }
  }

  // Regression impurity from the rows themselves, so constant targets give
  // exactly zero.
  double node_impurity(const Pending& p) const {
    const auto stats = tree_.stats(p.node);
    if (spec_.task == Task::kClassification) {
      return impurity(stats, spec_, config_.criterion);
    }
    const double w = stats[0];
    const double mean = stats[1] / w;
    double acc = 0.0;
    for (auto i : itb_span(p)) {
      const double r = labels_[i] - mean;
      acc += static_cast<double>(weights_[i]) * r * r;
    }
    return acc / w;
  }

  bool splittable(const Pending& p) const {
    const auto& n = tree_.node(p.node);
    if (n.itb_weight < config_.min_samples_split) return false;
    if (config_.use_oob && n.n_oob < config_.min_samples_split) return false;
    if (config_.max_depth && n.depth >= *config_.max_depth) return false;
    return node_impurity(p) > config_.min_impurity;
  }

  void try_split(Pending p) {
    if (!splittable(p)) return;
    auto engine = rng_.engine(Purpose::kFeatures, p.node);
    const auto features =
        subsample_features(bins_.size(), max_features_, engine);
    const auto candidate = find_best_split(
        p.itb_hist, p.oob_hist, features, bins_, spec_, config_.criterion,
        SplitConstraints{config_.min_samples_leaf, config_.use_oob});
    if (!candidate) return;
    const Split& split = candidate->split;

    auto goes_left = [&](std::size_t i) {
      return split.goes_left(binned_.at(i, split.feature));
    };
    const auto itb_mid = static_cast<std::size_t>(
        std::stable_partition(itb_.begin() + p.itb_begin,
                              itb_.begin() + p.itb_end, goes_left) -
        itb_.begin());
    const auto oob_mid = static_cast<std::size_t>(
        std::stable_partition(oob_.begin() + p.oob_begin,
                              oob_.begin() + p.oob_end, goes_left) -
        oob_.begin());

    tree_.split_node(p.node, split);
    const auto& parent = tree_.node(p.node);
    Pending left{parent.left, p.itb_begin, itb_mid, p.oob_begin, oob_mid, {},
                 {}};
    Pending right{parent.right, itb_mid, p.itb_end, oob_mid, p.oob_end, {},
                  {}};
    if (left.itb_begin == left.itb_end || right.itb_begin == right.itb_end) {
      throw InternalError("accepted split left a child without itb rows");
    }
    finalize(left);
    finalize(right);

    // Build the smaller child's histograms directly, derive the sibling.
    const bool left_smaller =
        (left.itb_end - left.itb_begin) <= (right.itb_end - right.itb_begin);
    Pending& small = left_smaller ? left : right;
    Pending& large = left_smaller ? right : left;
    small.itb_hist = compute_histogram(itb_span(small), weights_, binned_,
                                       n_bins_, labels_, spec_);
    large.itb_hist = sibling_histogram(p.itb_hist, small.itb_hist, spec_.task);
    if (config_.use_oob) {
      small.oob_hist = compute_count_histogram(oob_span(small), binned_,
                                               n_bins_);
      large.oob_hist = sibling_histogram(p.oob_hist, small.oob_hist);
    }
    stack_.push_back(std::move(right));
    stack_.push_back(std::move(left));
  }

  const BinnedMatrix& binned_;
  std::span<const FeatureBins> bins_;
  std::span<const double> labels_;
  LabelSpec spec_;
  std::span<const std::uint32_t> weights_;
  const GrowConfig& config_;
  RandomSource rng_;
  std::vector<std::size_t> itb_;
  std::vector<std::size_t> oob_;
  std::vector<std::uint32_t> n_bins_;
  std::size_t max_features_ = 1;
  std::vector<Pending> stack_;
  Tree tree_;
};

}  // namespace detail

// Grows one tree depth-first on the in-the-bag rows of `sample`, routing the
// out-of-bag rows alongside so every node records its out-of-bag loss.
// Log-weights are not computed here; see compute_log_weights.
inline Tree grow_tree(const BinnedMatrix& binned,
                      std::span<const FeatureBins> bins,
                      std::span<const double> labels, const LabelSpec& spec,
                      const BootstrapSample& sample, const GrowConfig& config,
                      const RandomSource& rng, GrowReport* report = nullptr) {
  if (sample.itb_indices.empty()) {
    throw ConfigError("cannot grow a tree without in-the-bag rows");
  }
  if (binned.n_cols() != bins.size()) {
    throw DataError("binned matrix and bin rules disagree on feature count");
  }
  if (labels.size() != binned.n_rows() || sample.n() != binned.n_rows()) {
    throw DataError("labels, sample and binned matrix disagree on row count");
  }
  return detail::TreeGrower(binned, bins, labels, spec, sample, config, rng)
      .grow(report);
}

}  // namespace treeagg

#endif  // TREEAGG_GROWER_HPP_
