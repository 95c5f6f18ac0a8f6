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

#ifndef TREEAGG_EXPERIMENTS_HPP_
#define TREEAGG_EXPERIMENTS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeagg/binning.hpp"
#include "treeagg/datasets.hpp"
#include "treeagg/error.hpp"
#include "treeagg/forest.hpp"
#include "treeagg/metrics.hpp"
#include "treeagg/random.hpp"

namespace treeagg {

struct SignalBenchConfig {
  std::vector<Signal> signals = {Signal::kDoppler, Signal::kHeavisine};
  std::vector<double> snrs = {0.5, 1.0};
  std::size_t repeats = 10;
  std::size_t n = 2048;
  std::size_t n_test = 1000;
  std::size_t n_trees = 100;
  // Temperature of the aggregated forests; unset keeps the library default.
  std::optional<double> eta = 1.0;
  std::uint64_t seed = 0;
  std::size_t n_workers = 1;
};

struct SignalBenchRow {
  Signal signal = Signal::kDoppler;
  double snr = 0.0;
  std::size_t repeats = 0;
  double mse_on = 0.0;
  double mse_off = 0.0;
  // Repeats where aggregation had the smaller error.
  std::size_t wins = 0;
};

// Test MSE against the noiseless signal at points off the training grid,
// averaged over repeats. Repeat r draws noise and trees with seed + r.
inline std::vector<SignalBenchRow> signal_benchmark(
    const SignalBenchConfig& config) {
  if (config.repeats == 0) throw ConfigError("repeats must be at least 1");
  if (config.n < 2 || config.n_test < 1) {
    throw ConfigError("need at least 2 training and 1 test point");
  }
  const auto t = signal_grid(config.n);
  std::vector<double> t_test(config.n_test);
  for (std::size_t i = 0; i < config.n_test; ++i) {
    t_test[i] = (static_cast<double>(i) + 0.25) /
                static_cast<double>(config.n_test);
  }
  RawMatrix X;
  X.columns.push_back(RawColumn::continuous("t", t));
  RawMatrix X_test;
  X_test.columns.push_back(RawColumn::continuous("t", t_test));

  std::vector<SignalBenchRow> rows;
  for (auto s : config.signals) {
    const auto f = sample_signal(s, t);
    const auto f_test = sample_signal(s, t_test);
    for (double snr : config.snrs) {
      SignalBenchRow row;
      row.signal = s;
      row.snr = snr;
      row.repeats = config.repeats;
      for (std::size_t r = 0; r < config.repeats; ++r) {
        const auto y = add_noise(f, snr, config.seed + r);
        TrainConfig c;
        c.task = Task::kRegression;
        c.n_trees = config.n_trees;
        c.eta = config.eta;
        c.seed = config.seed + r;
        c.n_workers = config.n_workers;
        const double on = mse(predict(fit(X, y, c), X_test), f_test);
        c.aggregation = false;
        const double off = mse(predict(fit(X, y, c), X_test), f_test);
        row.mse_on += on;
        row.mse_off += off;
        row.wins += on < off;
      }
      row.mse_on /= static_cast<double>(config.repeats);
      row.mse_off /= static_cast<double>(config.repeats);
      rows.push_back(row);
    }
  }
  return rows;
}

struct TreeBenchConfig {
  std::vector<std::size_t> tree_counts = {1, 2, 5, 10};
  std::size_t splits = 10;
  double test_fraction = 0.3;
  // Settings shared by both arms; n_trees and aggregation are overridden.
  TrainConfig base;
};

struct TreeBenchRow {
  std::size_t n_trees = 0;
  std::size_t splits = 0;
  double auc_on = 0.0;
  double auc_off = 0.0;
  std::size_t wins = 0;
};

inline double test_auc(std::span<const double> proba,
                       std::span<const double> y, std::size_t k) {
  if (k == 2) {
    std::vector<double> score(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) score[i] = proba[2 * i + 1];
    return roc_auc(score, y);
  }
  return multiclass_auc(proba, y, k).value;
}

// Test AUC against the number of trees on random train/test splits. Split s
// shuffles rows with seed base.seed + s and grows both arms with that seed.
// A forest of m trees is the first m trees of the largest forest.
inline std::vector<TreeBenchRow> tree_count_benchmark(
    const RawMatrix& X, std::span<const double> y,
    const std::vector<std::string>& class_names,
    const TreeBenchConfig& config) {
  if (config.tree_counts.empty()) throw ConfigError("no tree counts given");
  if (config.splits == 0) throw ConfigError("splits must be at least 1");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw ConfigError("test fraction must be in (0, 1)");
  }
  if (config.base.task != Task::kClassification) {
    throw ConfigError("the tree-count benchmark needs a classification task");
  }
  const std::size_t n = X.n_rows();
  if (y.size() != n) throw DataError("label count does not match the rows");
  const auto n_test = static_cast<std::size_t>(
      std::llround(config.test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) {
    throw DataError("too few rows for a train/test split");
  }
  const std::size_t max_trees =
      *std::max_element(config.tree_counts.begin(), config.tree_counts.end());

  std::vector<TreeBenchRow> rows(config.tree_counts.size());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    rows[c].n_trees = config.tree_counts[c];
    rows[c].splits = config.splits;
  }
  for (std::size_t s = 0; s < config.splits; ++s) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    CounterEngine engine(config.base.seed + s, 0, Purpose::kData, 7);
    std::shuffle(idx.begin(), idx.end(), engine);
    const std::span<const std::size_t> train(idx.data(), n - n_test);
    const std::span<const std::size_t> test(idx.data() + (n - n_test), n_test);
    std::vector<double> y_train, y_test;
    for (auto i : train) y_train.push_back(y[i]);
    for (auto i : test) y_test.push_back(y[i]);
    const auto X_train = X.take(train);
    const auto X_test = X.take(test);

    TrainConfig c = config.base;
    c.n_trees = max_trees;
    c.seed = config.base.seed + s;
    c.aggregation = true;
    const auto on = fit(X_train, y_train, c, class_names);
    c.aggregation = false;
    const auto off = fit(X_train, y_train, c, class_names);
    const std::size_t k = on.labels.n_classes;
    const auto binned = bin(on, X_test);
    for (auto& row : rows) {
      const double a = test_auc(
          predict_raw_output(first_trees(on, row.n_trees), binned), y_test, k);
      const double b = test_auc(
          predict_raw_output(first_trees(off, row.n_trees), binned), y_test,
          k);
      row.auc_on += a;
      row.auc_off += b;
      row.wins += a > b;
    }
  }
  for (auto& row : rows) {
    row.auc_on /= static_cast<double>(config.splits);
    row.auc_off /= static_cast<double>(config.splits);
  }
  return rows;
}

}  // namespace treeagg

#endif  // TREEAGG_EXPERIMENTS_HPP_
