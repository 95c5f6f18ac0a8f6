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

#ifndef TREEAGG_AGGREGATION_HPP_
#define TREEAGG_AGGREGATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "treeagg/binning.hpp"
#include "treeagg/criteria.hpp"
#include "treeagg/error.hpp"
#include "treeagg/tree.hpp"

namespace treeagg {

// Constant forecast of a node from its in-the-bag statistics: the
// Dirichlet(alpha)-smoothed class frequencies (n_k + alpha) / (n + alpha K)
// for classification, the weighted label mean for regression.
inline void node_forecast(std::span<const double> stats, const LabelSpec& spec,
                          double alpha, std::span<double> out) {
  if (spec.task == Task::kClassification) {
    if (!(alpha > 0.0)) {
      throw ConfigError("dirichlet parameter must be positive for log loss");
    }
    double n = 0.0;
    for (double c : stats) n += c;
    const double denom = n + alpha * static_cast<double>(spec.n_classes);
    for (std::size_t k = 0; k < spec.n_classes; ++k) {
      out[k] = (stats[k] + alpha) / denom;
    }
  } else {
    out[0] = stats[0] > 0.0 ? stats[1] / stats[0] : 0.0;
  }
}

inline std::vector<double> node_forecast(const Tree& tree, std::size_t v) {
  std::vector<double> out(tree.labels().output_width());
  node_forecast(tree.stats(v), tree.labels(), tree.alpha, out);
  return out;
}

// Log loss for classification, squared loss for regression.
inline double sample_loss(std::span<const double> forecast, double y,
                          const LabelSpec& spec) {
  if (spec.task == Task::kClassification) {
    return -std::log(forecast[static_cast<std::size_t>(y)]);
  }
  const double r = forecast[0] - y;
  return r * r;
}

// Sum of the losses of one constant forecast over the given labels.
inline double node_oob_loss(std::span<const double> forecast,
                            std::span<const double> oob_labels,
                            const LabelSpec& spec) {
  double total = 0.0;
  for (double y : oob_labels) total += sample_loss(forecast, y, spec);
  return total;
}

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

// Recomputes every node's out-of-bag count and loss by routing `oob_rows`
// from the root. Node forecasts use tree.alpha.
inline void compute_node_losses(Tree& tree, const BinnedMatrix& binned,
                                std::span<const double> labels,
                                std::span<const std::size_t> oob_rows) {
  const auto& spec = tree.labels();
  const std::size_t width = spec.output_width();
  std::vector<double> forecasts(tree.size() * width);
  for (std::size_t v = 0; v < tree.size(); ++v) {
    node_forecast(tree.stats(v), spec, tree.alpha,
                  std::span<double>(forecasts).subspan(v * width, width));
    tree.node(v).loss = 0.0;
    tree.node(v).n_oob = 0;
  }
  for (auto i : oob_rows) {
    const auto row = binned.row(i);
    std::uint32_t v = 0;
    while (true) {
      auto& n = tree.node(v);
      n.loss += sample_loss(
          std::span<const double>(forecasts).subspan(v * width, width),
          labels[i], spec);
      ++n.n_oob;
      if (n.is_leaf()) break;
      v = tree.child_for(v, row);
    }
  }
}

// Single reverse pass over the parenthood-ordered nodes:
//   leaf:     log wbar_v = -eta L_v
//   internal: log wbar_v = log(exp(-eta L_v) / 2 + wbar_v0 wbar_v1 / 2)
inline void compute_log_weights(Tree& tree, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ConfigError("temperature must be finite and nonnegative");
  }
  tree.eta = eta;
  for (std::size_t i = tree.size(); i-- > 0;) {
    auto& n = tree.node(i);
    if (!std::isfinite(n.loss)) {
      throw DataError("non-finite out-of-bag loss at node " +
                      std::to_string(i));
    }
    const double log_w = -eta * n.loss;
    if (n.is_leaf()) {
      n.log_wbar = log_w;
    } else {
      n.log_wbar = log_add(log_w, tree.node(n.left).log_wbar +
                                      tree.node(n.right).log_wbar) -
                   std::numbers::ln2;
    }
  }
}

// Changing the temperature only needs a new weight pass.
inline void set_temperature(Tree& tree, double eta) {
  compute_log_weights(tree, eta);
}

// Changing the Dirichlet parameter changes every forecast, so losses are
// recomputed from the out-of-bag rows before the weight pass.
inline void set_dirichlet(Tree& tree, double alpha, const BinnedMatrix& binned,
                          std::span<const double> labels,
                          std::span<const std::size_t> oob_rows) {
  tree.alpha = alpha;
  compute_node_losses(tree, binned, labels, oob_rows);
  compute_log_weights(tree, tree.eta);
}

// Mixing coefficient of node v on the way back up: exp(-eta L_v) / (2 wbar_v).
inline double mixing_weight(const Tree& tree, std::size_t v) {
  const auto& n = tree.node(v);
  return 0.5 * std::exp(-tree.eta * n.loss - n.log_wbar);
}

// Exponentially weighted average over all subtrees of the forecasts for
// `row`: descend to the leaf, then walk back to the root blending each
// ancestor's forecast in. `visits`, when given, is incremented once per node
// record touched.
inline void predict_aggregated(const Tree& tree,
                               std::span<const std::uint8_t> row,
                               std::span<double> out,
                               std::size_t* visits = nullptr) {
  const auto& spec = tree.labels();
  const std::size_t width = spec.output_width();
  std::uint32_t v = 0;
  if (visits) ++*visits;
  while (!tree.node(v).is_leaf()) {
    v = tree.child_for(v, row);
    if (visits) ++*visits;
  }
  node_forecast(tree.stats(v), spec, tree.alpha, out);
  std::vector<double> forecast(width);
  while (v != 0) {
    v = tree.node(v).parent;
    if (visits) ++*visits;
    const double a = std::min(1.0, mixing_weight(tree, v));
    node_forecast(tree.stats(v), spec, tree.alpha, forecast);
    for (std::size_t k = 0; k < width; ++k) {
      out[k] = a * forecast[k] + (1.0 - a) * out[k];
    }
  }
  if (spec.task == Task::kClassification) {
    double total = 0.0;
    for (double p : out) total += p;
    if (std::abs(total - 1.0) > 1e-12) {
      for (double& p : out) p /= total;
    }
  }
}

inline std::vector<double> predict_aggregated(
    const Tree& tree, std::span<const std::uint8_t> row) {
  std::vector<double> out(tree.labels().output_width());
  predict_aggregated(tree, row, out);
  return out;
}

// Forecast of the leaf containing `row`, as a standard random forest tree.
inline void predict_leaf_only(const Tree& tree,
                              std::span<const std::uint8_t> row,
                              std::span<double> out) {
  node_forecast(tree.stats(tree.leaf_of(row)), tree.labels(), tree.alpha, out);
}

inline std::vector<double> predict_leaf_only(
    const Tree& tree, std::span<const std::uint8_t> row) {
  std::vector<double> out(tree.labels().output_width());
  predict_leaf_only(tree, row, out);
  return out;
}

}  // namespace treeagg

#endif  // TREEAGG_AGGREGATION_HPP_
