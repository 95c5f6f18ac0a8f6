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

#ifndef TREEAGG_FOREST_HPP_
#define TREEAGG_FOREST_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "treeagg/aggregation.hpp"
#include "treeagg/binning.hpp"
#include "treeagg/criteria.hpp"
#include "treeagg/error.hpp"
#include "treeagg/grower.hpp"
#include "treeagg/random.hpp"
#include "treeagg/sampling.hpp"
#include "treeagg/tree.hpp"

namespace treeagg {

enum class Multiclass : std::uint8_t { kHeuristic = 0, kOneVsRest = 1 };

inline Multiclass multiclass_from_string(std::string_view s) {
  if (s == "heuristic") return Multiclass::kHeuristic;
  if (s == "ovr") return Multiclass::kOneVsRest;
  throw ConfigError("unknown multiclass strategy '" + std::string(s) + "'");
}

enum class PredictMode : std::uint8_t { kDefault, kAggregated, kLeafOnly };

struct TrainConfig {
  std::size_t n_trees = 10;
  Task task = Task::kClassification;
  std::size_t max_bins = kMaxBins;
  // 0 selects floor(sqrt(d)).
  std::size_t max_features = 0;
  double min_samples_leaf = 1.0;
  double min_samples_split = 2.0;
  double min_impurity = 0.0;
  std::optional<std::uint32_t> max_depth;
  // Defaults to 1 for classification and 1 / (8 B^2), B = max |y|, for
  // regression.
  std::optional<double> eta;
  double alpha = 0.5;
  // Defaults to gini for classification, variance for regression.
  std::optional<Criterion> criterion;
  bool aggregation = true;
  Multiclass multiclass = Multiclass::kHeuristic;
  std::uint64_t seed = 0;
  // Threads used by fit. Results do not depend on it.
  std::size_t n_workers = 1;

  Criterion resolved_criterion() const {
    if (criterion) return *criterion;
    return task == Task::kClassification ? Criterion::kGini
                                         : Criterion::kVariance;
  }

  void validate() const {
    if (n_trees < 1) throw ConfigError("n_trees must be at least 1");
    if (max_bins < 2 || max_bins > kMaxBins) {
      throw ConfigError("max_bins must be in [2, 256]");
    }
    if (!(min_samples_leaf >= 1.0)) {
      throw ConfigError("min_samples_leaf must be at least 1");
    }
    if (!(min_samples_split >= 2.0)) {
      throw ConfigError("min_samples_split must be at least 2");
    }
    if (!(min_impurity >= 0.0)) {
      throw ConfigError("min_impurity must be nonnegative");
    }
    if (eta && !(*eta > 0.0 && std::isfinite(*eta))) {
      throw ConfigError("eta must be positive and finite");
    }
    if (task == Task::kClassification && !(alpha > 0.0)) {
      throw ConfigError("dirichlet must be positive");
    }
    const auto c = resolved_criterion();
    if ((task == Task::kRegression) != (c == Criterion::kVariance)) {
      throw ConfigError("criterion '" + std::string(to_string(c)) +
                        "' does not match the task");
    }
  }
};

struct Forest {
  TrainConfig config;
  BinMapper mapper;
  LabelSpec labels;
  double eta = 1.0;
  std::vector<Tree> trees;
  // Class each tree votes for under one-vs-rest; 0 otherwise.
  std::vector<std::uint32_t> tree_class;
  std::vector<std::string> class_names;
  double y_min = 0.0;
  double y_max = 0.0;

  bool fitted() const { return !trees.empty(); }
  bool one_vs_rest() const {
    return config.multiclass == Multiclass::kOneVsRest &&
           labels.task == Task::kClassification && labels.n_classes > 2;
  }
  std::size_t output_width() const { return labels.output_width(); }

  friend bool operator==(const Forest& a, const Forest& b) {
    return a.mapper == b.mapper && a.labels == b.labels && a.eta == b.eta &&
           a.trees == b.trees && a.tree_class == b.tree_class &&
           a.class_names == b.class_names && a.y_min == b.y_min &&
           a.y_max == b.y_max;
  }
};

struct FitReport {
  std::size_t root_oob_starved = 0;
};

namespace detail {

// Runs job(t) for t in [0, n) on `workers` threads. Each job writes only its
// own slot.
template <typename Job>
void run_parallel(std::size_t n, std::size_t workers, Job&& job) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < n;) {
      try {
        job(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::size_t infer_classes(std::span<const double> y) {
  std::size_t k = 0;
  std::vector<bool> seen;
  for (double v : y) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e6) {
      throw DataError("class labels must be nonnegative integers");
    }
    const auto c = static_cast<std::size_t>(v);
    if (c >= seen.size()) seen.resize(c + 1, false);
    seen[c] = true;
    k = std::max(k, c + 1);
  }
  const auto distinct = std::count(seen.begin(), seen.end(), true);
  if (distinct < 2) {
    throw DataError("classification needs at least two distinct classes");
  }
  return k;
}

}  // namespace detail

// Random stream of the i-th tree of class group c: i * groups + c.
inline std::uint64_t tree_stream(std::size_t t, std::size_t n_trees,
                                 std::size_t groups) {
  return (t % n_trees) * groups + t / n_trees;
}

// Trains the forest. Each tree draws its bootstrap and feature subsets from
// its own stream; the result is identical for any number of workers.

inline Forest fit(const RawMatrix& X, std::span<const double> y,
                  const TrainConfig& config,
                  std::vector<std::string> class_names = {},
                  FitReport* report = nullptr) {
  config.validate();
  X.validate();
  if (X.n_cols() == 0) throw DataError("no feature columns");
  if (y.size() != X.n_rows()) {
    throw DataError("got " + std::to_string(y.size()) + " labels for " +
                    std::to_string(X.n_rows()) + " rows");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DataError("labels must be finite");
  }

  Forest forest;
  forest.config = config;
  forest.labels.task = config.task;
  if (config.task == Task::kClassification) {
    forest.labels.n_classes = detail::infer_classes(y);
    if (!class_names.empty() &&
        class_names.size() != forest.labels.n_classes) {
      throw DataError("class name count does not match the labels");
    }
    forest.class_names = std::move(class_names);
    forest.eta = config.eta.value_or(1.0);
  } else {
    forest.labels.n_classes = 0;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    forest.y_min = *lo;
    forest.y_max = *hi;
    const double bound = std::max(std::abs(*lo), std::abs(*hi));
    forest.eta = config.eta.value_or(bound > 0.0 ? 1.0 / (8.0 * bound * bound)
                                                 : 1.0);
  }
  forest.mapper = fit_bins(X, config.max_bins);
  const auto binned = transform(X, forest.mapper);

  GrowConfig grow;
  grow.criterion = config.resolved_criterion();
  grow.max_features = config.max_features;
  grow.min_samples_leaf = config.min_samples_leaf;
  grow.min_samples_split = config.min_samples_split;
  grow.min_impurity = config.min_impurity;
  grow.max_depth = config.max_depth;
  grow.use_oob = config.aggregation;
  grow.alpha = config.alpha;
  if (grow.max_features > X.n_cols()) {
    throw ConfigError("max_features exceeds the number of features");
  }

  // One-vs-rest trains n_trees binary trees per class on 0/1 labels.
  const bool ovr = forest.one_vs_rest();
  const std::size_t groups = ovr ? forest.labels.n_classes : 1;
  std::vector<std::vector<double>> binary(groups);
  LabelSpec tree_labels = forest.labels;
  if (ovr) {
    tree_labels.n_classes = 2;
    for (std::size_t c = 0; c < groups; ++c) {
      binary[c].reserve(y.size());
      for (double v : y) {
        binary[c].push_back(static_cast<std::size_t>(v) == c ? 1.0 : 0.0);
      }
    }
  }

  const std::size_t n_jobs = groups * config.n_trees;
  forest.trees.resize(n_jobs);
  forest.tree_class.resize(n_jobs, 0);
  std::vector<GrowReport> reports(n_jobs);
  detail::run_parallel(n_jobs, config.n_workers, [&](std::size_t t) {
    const auto cls = static_cast<std::uint32_t>(t / config.n_trees);
    const RandomSource rng{config.seed, tree_stream(t, config.n_trees, groups)};
    const auto sample = bootstrap(X.n_rows(), rng);
    const std::span<const double> labels =
        ovr ? std::span<const double>(binary[cls]) : y;
    Tree tree = grow_tree(binned, forest.mapper.features, labels, tree_labels,
                          sample, grow, rng, &reports[t]);
    compute_log_weights(tree, forest.eta);
    forest.trees[t] = std::move(tree);
    forest.tree_class[t] = ovr ? cls : 0;
  });
  if (report) {
    report->root_oob_starved = static_cast<std::size_t>(
        std::count_if(reports.begin(), reports.end(),
                      [](const auto& r) { return r.root_oob_starved; }));
  }
  return forest;
}

inline bool use_aggregation(const Forest& forest, PredictMode mode) {
  if (mode == PredictMode::kAggregated) return true;
  if (mode == PredictMode::kLeafOnly) return false;
  return forest.config.aggregation;
}

// Row-major (n_rows x output_width) forest output on binned rows: class
// probabilities for classification, values for regression.
inline std::vector<double> predict_raw_output(
    const Forest& forest, const BinnedMatrix& binned,
    PredictMode mode = PredictMode::kDefault) {
  if (!forest.fitted()) throw ConfigError("forest is not fitted");
  const bool aggregated = use_aggregation(forest, mode);
  const std::size_t width = forest.output_width();
  const std::size_t n = binned.n_rows();
  std::vector<double> out(n * width, 0.0);
  const std::size_t tree_width = forest.trees.front().labels().output_width();
  std::vector<double> buf(tree_width);
  const bool ovr = forest.one_vs_rest();
  std::vector<double> per_class(width, 0.0);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    per_class[forest.tree_class[t]] += 1.0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto dst = std::span<double>(out).subspan(i * width, width);
    const auto row = binned.row(i);
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      if (aggregated) {
        predict_aggregated(forest.trees[t], row, buf);
      } else {
        predict_leaf_only(forest.trees[t], row, buf);
      }
      if (ovr) {
        dst[forest.tree_class[t]] += buf[1];
      } else {
        for (std::size_t k = 0; k < width; ++k) dst[k] += buf[k];
      }
    }
    if (ovr) {
      double total = 0.0;
      for (std::size_t k = 0; k < width; ++k) {
        dst[k] /= per_class[k];
        total += dst[k];
      }
      for (auto& p : dst) p /= total;
    } else {
      const auto m = static_cast<double>(forest.trees.size());
      for (auto& v : dst) v /= m;
    }
    if (forest.labels.task == Task::kRegression) {
      dst[0] = std::clamp(dst[0], forest.y_min, forest.y_max);
    }
  }
  return out;
}

// The forest made of the first m trees of each class group; identical to
// fitting with n_trees = m and the same seed.
inline Forest first_trees(const Forest& forest, std::size_t m) {
  if (m == 0 || m > forest.config.n_trees) {
    throw ConfigError("tree count must be in [1, " +
                      std::to_string(forest.config.n_trees) + "]");
  }
  Forest out = forest;
  out.trees.clear();
  out.tree_class.clear();
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    if (t % forest.config.n_trees < m) {
      out.trees.push_back(forest.trees[t]);
      out.tree_class.push_back(forest.tree_class[t]);
    }
  }
  out.config.n_trees = m;
  return out;
}

// Out-of-bag forest output on the training rows: each row averages only the
// trees whose bootstrap left it out. Rows that no tree left out are NaN.
inline std::vector<double> oob_raw_output(
    const Forest& forest, const BinnedMatrix& binned,
    PredictMode mode = PredictMode::kDefault) {
  if (!forest.fitted()) throw ConfigError("forest is not fitted");
  const bool aggregated = use_aggregation(forest, mode);
  const std::size_t width = forest.output_width();
  const std::size_t n = binned.n_rows();
  const bool ovr = forest.one_vs_rest();
  std::vector<double> sum(n * width, 0.0);
  std::vector<double> votes(n * width, 0.0);
  std::vector<double> buf(forest.trees.front().labels().output_width());
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto sample = bootstrap(
        n, RandomSource{forest.config.seed,
                        tree_stream(t, forest.config.n_trees,
                                    forest.trees.size() / forest.config.n_trees)});
    for (std::size_t i : sample.oob_indices) {
      const auto row = binned.row(i);
      if (aggregated) {
        predict_aggregated(forest.trees[t], row, buf);
      } else {
        predict_leaf_only(forest.trees[t], row, buf);
      }
      if (ovr) {
        const std::size_t k = forest.tree_class[t];
        sum[i * width + k] += buf[1];
        votes[i * width + k] += 1.0;
      } else {
        for (std::size_t k = 0; k < width; ++k) {
          sum[i * width + k] += buf[k];
          votes[i * width + k] += 1.0;
        }
      }
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = std::span<double>(sum).subspan(i * width, width);
    const auto cnt = std::span<const double>(votes).subspan(i * width, width);
    if (std::any_of(cnt.begin(), cnt.end(), [](double c) { return c == 0; })) {
      std::fill(dst.begin(), dst.end(), nan);
      continue;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      dst[k] /= cnt[k];
      total += dst[k];
    }
    if (ovr) {
      for (auto& p : dst) p /= total;
    }
    if (forest.labels.task == Task::kRegression) {
      dst[0] = std::clamp(dst[0], forest.y_min, forest.y_max);
    }
  }
  return sum;
}

inline BinnedMatrix bin(const Forest& forest, const RawMatrix& X) {
  if (!forest.fitted()) throw ConfigError("forest is not fitted");
  return transform(X, forest.mapper);
}

// Class probabilities, row-major n_rows x n_classes.
inline std::vector<double> predict_proba(
    const Forest& forest, const RawMatrix& X,
    PredictMode mode = PredictMode::kDefault) {
  if (forest.labels.task != Task::kClassification) {
    throw ConfigError("predict_proba needs a classification forest");
  }
  return predict_raw_output(forest, bin(forest, X), mode);
}

// Class indices (argmax, lowest index on ties) or regression values.
inline std::vector<double> predict(const Forest& forest, const RawMatrix& X,
                                   PredictMode mode = PredictMode::kDefault) {
  const auto raw = predict_raw_output(forest, bin(forest, X), mode);
  if (forest.labels.task == Task::kRegression) return raw;
  const std::size_t k = forest.labels.n_classes;
  std::vector<double> labels(X.n_rows());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto first = raw.begin() + static_cast<std::ptrdiff_t>(i * k);
    labels[i] = static_cast<double>(std::max_element(first, first + k) - first);
  }
  return labels;
}

}  // namespace treeagg

#endif  // TREEAGG_FOREST_HPP_
