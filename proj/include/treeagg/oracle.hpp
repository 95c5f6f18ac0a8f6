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

#ifndef TREEAGG_ORACLE_HPP_
#define TREEAGG_ORACLE_HPP_

// Brute-force reference computations over every subtree of a small tree.
// Exponential in the tree size; used by the test suites and `verify`.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "treeagg/aggregation.hpp"
#include "treeagg/binning.hpp"
#include "treeagg/error.hpp"
#include "treeagg/tree.hpp"

namespace treeagg {

inline constexpr std::size_t kDefaultEnumerationLimit = 24;

// A subtree rooted at the root, given by its leaves. `complexity` is the
// number of its nodes minus the number of its leaves that are also leaves of
// the full tree; its prior mass is 2^-complexity.
struct Subtree {
  std::vector<std::uint32_t> leaves;
  std::uint32_t complexity = 0;
};

namespace detail {

inline std::vector<Subtree> subtrees_below(const Tree& tree, std::uint32_t v) {
  const auto& n = tree.node(v);
  if (n.is_leaf()) return {Subtree{{v}, 0}};
  std::vector<Subtree> out{Subtree{{v}, 1}};
  const auto left = subtrees_below(tree, n.left);
  const auto right = subtrees_below(tree, n.right);
  out.reserve(1 + left.size() * right.size());
  for (const auto& a : left) {
    for (const auto& b : right) {
      Subtree s;
      s.leaves = a.leaves;
      s.leaves.insert(s.leaves.end(), b.leaves.begin(), b.leaves.end());
      s.complexity = 1 + a.complexity + b.complexity;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace detail

// All subtrees rooted at the root. Refuses trees with more than `max_nodes`
// nodes.
inline std::vector<Subtree> enumerate_subtrees(
    const Tree& tree, std::size_t max_nodes = kDefaultEnumerationLimit) {
  if (tree.empty()) throw ConfigError("cannot enumerate an empty tree");
  if (tree.size() > max_nodes) {
    throw ConfigError("tree has " + std::to_string(tree.size()) +
                      " nodes, enumeration limit is " +
                      std::to_string(max_nodes));
  }
  return detail::subtrees_below(tree, 0);
}

// Number of subtrees by the recursion N(leaf) = 1, N(v) = 1 + N(v0) N(v1).
inline std::uint64_t count_subtrees(const Tree& tree, std::uint32_t v = 0) {
  const auto& n = tree.node(v);
  if (n.is_leaf()) return 1;
  return 1 + count_subtrees(tree, n.left) * count_subtrees(tree, n.right);
}

// Checks sum_T 2^-||T|| == 1 in exact integer arithmetic by scaling every
// term by 2^max||T||.
inline bool prior_sums_to_one(std::span<const Subtree> subtrees) {
  std::uint32_t top = 0;
  for (const auto& s : subtrees) top = std::max(top, s.complexity);
  if (top > 62) throw ConfigError("subtree complexity too large for check");
  detail::uint128 total = 0;
  for (const auto& s : subtrees) {
    total += static_cast<detail::uint128>(1) << (top - s.complexity);
  }
  return total == (static_cast<detail::uint128>(1) << top);
}

// The leaf of subtree `s` containing the row whose full-tree path is `path`.
inline std::uint32_t subtree_leaf(const Subtree& s,
                                  std::span<const std::uint32_t> path) {
  for (auto v : path) {
    if (std::find(s.leaves.begin(), s.leaves.end(), v) != s.leaves.end()) {
      return v;
    }
  }
  throw InternalError("subtree leaves do not cover the path");
}

// Direct evaluation of
//   sum_T pi(T) exp(-eta L_T) yhat_T(x) / sum_T pi(T) exp(-eta L_T)
// with L_T the sum of the node losses over the leaves of T, in log space.
inline std::vector<double> brute_force_aggregate(
    const Tree& tree, std::span<const Subtree> subtrees,
    std::span<const std::uint8_t> row) {
  const auto path = tree.path(row);
  std::vector<double> log_w(subtrees.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < subtrees.size(); ++t) {
    double loss = 0.0;
    for (auto v : subtrees[t].leaves) loss += tree.node(v).loss;
    log_w[t] = -static_cast<double>(subtrees[t].complexity) *
                   std::numbers::ln2 -
               tree.eta * loss;
    top = std::max(top, log_w[t]);
  }
  const std::size_t width = tree.labels().output_width();
  std::vector<double> num(width, 0.0);
  double den = 0.0;
  for (std::size_t t = 0; t < subtrees.size(); ++t) {
    const double w = std::exp(log_w[t] - top);
    const auto forecast = node_forecast(tree, subtree_leaf(subtrees[t], path));
    for (std::size_t k = 0; k < width; ++k) num[k] += w * forecast[k];
    den += w;
  }
  for (auto& x : num) x /= den;
  return num;
}

inline std::vector<double> brute_force_aggregate(
    const Tree& tree, std::span<const std::uint8_t> row,
    std::size_t max_nodes = kDefaultEnumerationLimit) {
  const auto subtrees = enumerate_subtrees(tree, max_nodes);
  return brute_force_aggregate(tree, subtrees, row);
}

struct OracleReport {
  std::size_t n_subtrees = 0;
  std::size_t n_oob = 0;
  double aggregated_loss = 0.0;   // mean oob loss of the aggregated forecast
  double best_bound = 0.0;        // min over T of the right-hand side
  double max_violation = -std::numeric_limits<double>::infinity();
};

// Evaluates, for every subtree T,
//   mean oob loss of the aggregate - mean oob loss of T
//     - (log 2 / eta) ||T|| / (n_oob + 1)
// and reports the largest value. A positive value breaks the guarantee.
// Subtree losses are recomputed per sample from the forecasts, not taken
// from the node loss fields.
inline OracleReport check_oracle_inequality(
    const Tree& tree, const BinnedMatrix& binned,
    std::span<const double> labels, std::span<const std::size_t> oob_rows,
    std::size_t max_nodes = kDefaultEnumerationLimit) {
  if (!(tree.eta > 0.0)) throw ConfigError("oracle check needs eta > 0");
  const auto subtrees = enumerate_subtrees(tree, max_nodes);
  const auto& spec = tree.labels();
  OracleReport report;
  report.n_subtrees = subtrees.size();
  report.n_oob = oob_rows.size();
  if (oob_rows.empty()) return report;

  std::vector<double> subtree_loss(subtrees.size(), 0.0);
  std::vector<double> out(spec.output_width());
  double aggregated = 0.0;
  for (auto i : oob_rows) {
    const auto row = binned.row(i);
    predict_aggregated(tree, row, out);
    aggregated += sample_loss(out, labels[i], spec);
    const auto path = tree.path(row);
    for (std::size_t t = 0; t < subtrees.size(); ++t) {
      const auto forecast = node_forecast(tree, subtree_leaf(subtrees[t], path));
      subtree_loss[t] += sample_loss(forecast, labels[i], spec);
    }
  }
  const double n = static_cast<double>(oob_rows.size());
  report.aggregated_loss = aggregated / n;
  report.best_bound = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < subtrees.size(); ++t) {
    const double bound =
        subtree_loss[t] / n + std::numbers::ln2 / tree.eta *
                                  static_cast<double>(subtrees[t].complexity) /
                                  (n + 1.0);
    report.best_bound = std::min(report.best_bound, bound);
    report.max_violation =
        std::max(report.max_violation, report.aggregated_loss - bound);
  }
  return report;
}

// Excess log loss of the Krichevsky-Trofimov forecast over the best constant
// distribution, for a vector of class counts.
inline double kt_regret(std::span<const std::uint32_t> counts) {
  double n = 0.0;
  for (auto c : counts) n += c;
  const double k = static_cast<double>(counts.size());
  double regret = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double kt = (c + 0.5) / (n + k / 2.0);
    const double ml = c / n;
    regret += c * (std::log(ml) - std::log(kt));
  }
  return regret;
}

}  // namespace treeagg

#endif  // TREEAGG_ORACLE_HPP_
