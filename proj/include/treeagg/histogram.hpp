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

#ifndef TREEAGG_HISTOGRAM_HPP_
#define TREEAGG_HISTOGRAM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "treeagg/binning.hpp"
#include "treeagg/criteria.hpp"
#include "treeagg/error.hpp"

namespace treeagg {

// Per (feature, bin) statistics of the rows of one node. Each cell holds
// `width` doubles: class counts, a regression triple, or a single count.
class Histogram {
 public:
  Histogram() = default;
  Histogram(std::span<const std::uint32_t> n_bins, std::size_t width)
      : width_(width), n_bins_(n_bins.begin(), n_bins.end()) {
    offsets_.reserve(n_bins_.size() + 1);
    std::size_t off = 0;
    for (auto b : n_bins_) {
      offsets_.push_back(off);
      off += b * width_;
    }
    offsets_.push_back(off);
    data_.assign(off, 0.0);
  }

  std::size_t n_features() const { return n_bins_.size(); }
  std::size_t n_bins(std::size_t j) const { return n_bins_[j]; }
  std::size_t width() const { return width_; }

  std::span<double> cell(std::size_t j, std::size_t b) {
    return {data_.data() + offsets_[j] + b * width_, width_};
  }
  std::span<const double> cell(std::size_t j, std::size_t b) const {
    return {data_.data() + offsets_[j] + b * width_, width_};
  }
  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  bool same_shape(const Histogram& other) const {
    return width_ == other.width_ && n_bins_ == other.n_bins_;
  }

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::size_t width_ = 0;
  std::vector<std::uint32_t> n_bins_;
  std::vector<std::size_t> offsets_;
  std::vector<double> data_;
};

// Bootstrap-weighted label statistics of `rows`. `weights` is indexed by row
// id; an empty span means multiplicity 1 for every row.
inline Histogram compute_histogram(std::span<const std::size_t> rows,
                                   std::span<const std::uint32_t> weights,
                                   const BinnedMatrix& binned,
                                   std::span<const std::uint32_t> n_bins,
                                   std::span<const double> labels,
                                   const LabelSpec& spec) {
  Histogram h(n_bins, spec.width());
  const std::size_t d = n_bins.size();
  for (auto i : rows) {
    const double w = weights.empty() ? 1.0 : static_cast<double>(weights[i]);
    const auto row = binned.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      spec.accumulate(h.cell(j, row[j]), labels[i], w);
    }
  }
  return h;
}

// Plain row counts per (feature, bin); used for out-of-bag rows.
inline Histogram compute_count_histogram(std::span<const std::size_t> rows,
                                         const BinnedMatrix& binned,
                                         std::span<const std::uint32_t> n_bins) {
  Histogram h(n_bins, 1);
  const std::size_t d = n_bins.size();
  for (auto i : rows) {
    const auto row = binned.row(i);
    for (std::size_t j = 0; j < d; ++j) h.cell(j, row[j])[0] += 1.0;
  }
  return h;
}

// parent - child, entrywise. Counts and weights must stay nonnegative; cells
// whose weight drops to zero are reset to exact zeros so regression sums do
// not carry cancellation noise.
inline Histogram sibling_histogram(const Histogram& parent,
                                   const Histogram& child,
                                   Task task = Task::kClassification) {
  if (!parent.same_shape(child)) {
    throw InternalError("sibling histogram shape mismatch");
  }
  Histogram out = parent;
  auto dst = out.values();
  auto src = child.values();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] -= src[k];

  const std::size_t width = out.width();
  const bool is_regression = task == Task::kRegression;
  for (std::size_t j = 0; j < out.n_features(); ++j) {
    for (std::size_t b = 0; b < out.n_bins(j); ++b) {
      auto c = out.cell(j, b);
      if (is_regression) {
        if (c[0] < 0.0) throw InternalError("negative weight in histogram");
        if (c[0] == 0.0) {
          c[1] = 0.0;
          c[2] = 0.0;
        } else if (c[2] < 0.0) {
          c[2] = 0.0;
        }
      } else {
        for (std::size_t k = 0; k < width; ++k) {
          if (c[k] < 0.0) throw InternalError("negative count in histogram");
        }
      }
    }
  }
  return out;
}

}  // namespace treeagg

#endif  // TREEAGG_HISTOGRAM_HPP_
