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

#ifndef TREEAGG_CRITERIA_HPP_
#define TREEAGG_CRITERIA_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "treeagg/error.hpp"

namespace treeagg {

enum class Task : std::uint8_t { kClassification = 0, kRegression = 1 };

enum class Criterion : std::uint8_t { kGini = 0, kEntropy = 1, kVariance = 2 };

// Shape of the per-node label statistics: K weighted class counts for
// classification, (weight, sum y, sum y^2) for regression.
struct LabelSpec {
  Task task = Task::kClassification;
  std::size_t n_classes = 2;

  std::size_t width() const {
    return task == Task::kClassification ? n_classes : 3;
  }
  // Width of a forecast: class probabilities or a single value.
  std::size_t output_width() const {
    return task == Task::kClassification ? n_classes : 1;
  }

  // Adds one labelled row with bootstrap multiplicity w.
  void accumulate(std::span<double> stats, double y, double w) const {
    if (task == Task::kClassification) {
      stats[static_cast<std::size_t>(y)] += w;
    } else {
      stats[0] += w;
      stats[1] += w * y;
      stats[2] += w * y * y;
    }
  }

  double weight(std::span<const double> stats) const {
    if (task == Task::kRegression) return stats[0];
    double total = 0.0;
    for (double c : stats) total += c;
    return total;
  }

  friend bool operator==(const LabelSpec&, const LabelSpec&) = default;
};

inline std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::kGini:
      return "gini";
    case Criterion::kEntropy:
      return "entropy";
    case Criterion::kVariance:
      return "variance";
  }
  return "?";
}

inline Criterion criterion_from_string(std::string_view s) {
  if (s == "gini") return Criterion::kGini;
  if (s == "entropy") return Criterion::kEntropy;
  if (s == "variance") return Criterion::kVariance;
  throw ConfigError("unknown criterion '" + std::string(s) + "'");
}

// Impurity of a node from its label statistics.
//   gini     1 - sum_k p_k^2
//   entropy  -sum_k p_k log p_k   (0 log 0 := 0)
//   variance sum y^2 / w - (sum y / w)^2, clamped at 0
inline double impurity(std::span<const double> stats, const LabelSpec& labels,
                       Criterion criterion) {
  const double w = labels.weight(stats);
  if (!(w > 0.0)) throw DataError("impurity of a node with zero weight");
  if (labels.task == Task::kRegression) {
    if (criterion != Criterion::kVariance) {
      throw ConfigError("regression requires the variance criterion");
    }
    const double mean = stats[1] / w;
    return std::max(0.0, stats[2] / w - mean * mean);
  }
  double acc = 0.0;
  switch (criterion) {
    case Criterion::kGini:
      for (double c : stats) {
        const double p = c / w;
        acc += p * p;
      }
      return std::max(0.0, 1.0 - acc);
    case Criterion::kEntropy:
      for (double c : stats) {
        if (c > 0.0) {
          const double p = c / w;
          acc -= p * std::log(p);
        }
      }
      return std::max(0.0, acc);
    case Criterion::kVariance:
      break;
  }
  throw ConfigError("classification requires the gini or entropy criterion");
}

}  // namespace treeagg

#endif  // TREEAGG_CRITERIA_HPP_
