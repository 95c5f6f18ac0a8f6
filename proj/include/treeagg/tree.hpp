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

#ifndef TREEAGG_TREE_HPP_
#define TREEAGG_TREE_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "treeagg/criteria.hpp"
#include "treeagg/split.hpp"

namespace treeagg {

inline constexpr std::uint32_t kNoNode =
    std::numeric_limits<std::uint32_t>::max();

struct Node {
  std::uint32_t parent = kNoNode;
  std::uint32_t left = kNoNode;
  std::uint32_t right = kNoNode;
  std::uint32_t depth = 0;
  Split split;
  std::uint32_t n_itb = 0;    // distinct in-the-bag rows
  double itb_weight = 0.0;    // sum of bootstrap multiplicities
  std::uint32_t n_oob = 0;
  double loss = 0.0;          // cumulative out-of-bag loss of the node forecast
  double log_wbar = 0.0;      // log of the subtree-averaged weight

  bool is_leaf() const { return left == kNoNode; }

  friend bool operator==(const Node&, const Node&) = default;
};

// Binary tree stored as a flat array in parenthood order: children always
// have larger indices than their parent. Node 0 is the root.
class Tree {
 public:
  Tree() = default;
  explicit Tree(LabelSpec labels) : labels_(labels) {}

  const LabelSpec& labels() const { return labels_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  const Node& node(std::size_t v) const { return nodes_[v]; }
  Node& node(std::size_t v) { return nodes_[v]; }
  std::span<const Node> nodes() const { return nodes_; }

  std::span<const double> stats(std::size_t v) const {
    return {stats_.data() + v * labels_.width(), labels_.width()};
  }
  std::span<double> stats(std::size_t v) {
    return {stats_.data() + v * labels_.width(), labels_.width()};
  }

  // Appends a node (leaf until split) and returns its index.
  std::uint32_t add_node(std::uint32_t parent) {
    Node n;
    n.parent = parent;
    if (parent != kNoNode) n.depth = nodes_[parent].depth + 1;
    nodes_.push_back(n);
    stats_.resize(stats_.size() + labels_.width(), 0.0);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  // Turns leaf v into an internal node with two fresh children.
  void split_node(std::uint32_t v, const Split& split) {
    const auto l = add_node(v);
    const auto r = add_node(v);
    nodes_[v].split = split;
    nodes_[v].left = l;
    nodes_[v].right = r;
  }

  // Replaces the contents, e.g. when loading a saved model.
  void restore(std::vector<Node> nodes, std::vector<double> stats) {
    if (stats.size() != nodes.size() * labels_.width()) {
      throw InternalError("node statistics do not match the node count");
    }
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      const auto& n = nodes[v];
      const bool leaf = n.left == kNoNode && n.right == kNoNode;
      if (!leaf && (n.left <= v || n.right <= v || n.left >= nodes.size() ||
                    n.right >= nodes.size() || nodes[n.left].parent != v ||
                    nodes[n.right].parent != v)) {
        throw InternalError("nodes are not in parenthood order");
      }
    }
    nodes_ = std::move(nodes);
    stats_ = std::move(stats);
  }

  std::size_t n_leaves() const {
    std::size_t n = 0;
    for (const auto& node : nodes_) n += node.is_leaf() ? 1 : 0;
    return n;
  }

  std::uint32_t max_depth() const {
    std::uint32_t d = 0;
    for (const auto& node : nodes_) d = std::max(d, node.depth);
    return d;
  }

  std::uint32_t child_for(std::uint32_t v,
                          std::span<const std::uint8_t> row) const {
    const auto& n = nodes_[v];
    return n.split.goes_left(row[n.split.feature]) ? n.left : n.right;
  }

  std::uint32_t leaf_of(std::span<const std::uint8_t> row) const {
    std::uint32_t v = 0;
    while (!nodes_[v].is_leaf()) v = child_for(v, row);
    return v;
  }

  // Root-to-leaf node indices for `row`.
  std::vector<std::uint32_t> path(std::span<const std::uint8_t> row) const {
    std::vector<std::uint32_t> out{0};
    while (!nodes_[out.back()].is_leaf()) {
      out.push_back(child_for(out.back(), row));
    }
    return out;
  }

  // Aggregation hyperparameters the losses and log-weights were computed
  // with.
  double eta = 1.0;
  double alpha = 0.5;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  LabelSpec labels_;
  std::vector<Node> nodes_;
  std::vector<double> stats_;
};

}  // namespace treeagg

#endif  // TREEAGG_TREE_HPP_
