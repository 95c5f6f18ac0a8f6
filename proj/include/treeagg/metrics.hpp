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

#ifndef TREEAGG_METRICS_HPP_
#define TREEAGG_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "treeagg/error.hpp"

namespace treeagg {

struct EvalReport {
  std::string metric;
  double value = 0.0;
  std::vector<double> per_class;
  std::size_t n_samples = 0;
};

// Area under the ROC curve through the Mann-Whitney statistic with midranks:
// P(score+ > score-) + P(score+ = score-) / 2. Labels must be 0 or 1.
inline double roc_auc(std::span<const double> scores,
                      std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw DataError("roc_auc: scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return scores[a] < scores[b]; });
  double positives = 0.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + j) + 1.0) / 2.0;
    for (std::size_t r = i; r < j; ++r) {
      const double y = labels[order[r]];
      if (y != 0.0 && y != 1.0) throw DataError("roc_auc: labels must be 0/1");
      if (y == 1.0) {
        positives += 1.0;
        rank_sum += midrank;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw DataError("roc_auc needs both classes");
  }
  return (rank_sum - positives * (positives + 1.0) / 2.0) /
         (positives * negatives);
}

// Unweighted mean over classes of the one-vs-rest AUC. `proba` is row-major
// n x n_classes; labels are class indices.
inline EvalReport multiclass_auc(std::span<const double> proba,
                                 std::span<const double> labels,
                                 std::size_t n_classes) {
  const std::size_t n = labels.size();
  if (proba.size() != n * n_classes) {
    throw DataError("multiclass_auc: probability matrix has the wrong shape");
  }
  std::vector<std::size_t> counts(n_classes, 0);
  for (double y : labels) {
    if (!(y >= 0.0) || y != std::floor(y)) {
      throw DataError("multiclass_auc: labels must be class indices");
    }
    const auto c = static_cast<std::size_t>(y);
    if (c >= n_classes) throw DataError("multiclass_auc: label out of range");
    ++counts[c];
  }
  std::string missing;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] == 0) missing += (missing.empty() ? "" : ", ") + std::to_string(c);
  }
  if (!missing.empty()) {
    throw DataError("multiclass_auc: classes absent from labels: " + missing);
  }
  EvalReport report;
  report.metric = "auc";
  report.n_samples = n;
  std::vector<double> score(n), target(n);
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      score[i] = proba[i * n_classes + c];
      target[i] = static_cast<std::size_t>(labels[i]) == c ? 1.0 : 0.0;
    }
    report.per_class.push_back(roc_auc(score, target));
  }
  report.value = std::accumulate(report.per_class.begin(),
                                 report.per_class.end(), 0.0) /
                 static_cast<double>(n_classes);
  return report;
}

// Mean of -log p(true class).
inline double log_loss(std::span<const double> proba,
                       std::span<const double> labels, std::size_t n_classes) {
  if (proba.size() != labels.size() * n_classes || labels.empty()) {
    throw DataError("log_loss: probability matrix has the wrong shape");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!(labels[i] >= 0.0) || labels[i] >= static_cast<double>(n_classes)) {
      throw DataError("log_loss: label out of range at row " +
                      std::to_string(i));
    }
    const double p = proba[i * n_classes + static_cast<std::size_t>(labels[i])];
    if (!(p > 0.0)) {
      throw DataError("log_loss: zero probability on the true class at row " +
                      std::to_string(i));
    }
    total -= std::log(p);
  }
  return total / static_cast<double>(labels.size());
}

inline double mse(std::span<const double> pred, std::span<const double> y) {
  if (pred.size() != y.size() || y.empty()) {
    throw DataError("mse: inputs differ in length or are empty");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = pred[i] - y[i];
    total += r * r;
  }
  return total / static_cast<double>(y.size());
}

}  // namespace treeagg

#endif  // TREEAGG_METRICS_HPP_
