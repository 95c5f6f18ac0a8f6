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

#ifndef TREEAGG_SPLIT_HPP_
#define TREEAGG_SPLIT_HPP_

#include <algorithm>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "treeagg/binning.hpp"
#include "treeagg/criteria.hpp"
#include "treeagg/histogram.hpp"

namespace treeagg {

using BinMask = std::bitset<kMaxBins>;

// Lexicographic order on masks read from bin 0 upwards, unset before set.
inline bool mask_less(const BinMask& a, const BinMask& b) {
  for (std::size_t i = 0; i < kMaxBins; ++i) {
    if (a[i] != b[i]) return !a[i];
  }
  return false;
}

// Rows whose bin is in `left_bins` go to the left child. For continuous
// features the mask is {0..threshold} plus the missing bin when
// `missing_left` is set.
struct Split {
  std::uint32_t feature = 0;
  FeatureKind kind = FeatureKind::kContinuous;
  std::uint32_t threshold = 0;
  bool missing_left = false;
  BinMask left_bins;

  bool goes_left(std::uint8_t bin) const { return left_bins[bin]; }

  friend bool operator==(const Split&, const Split&) = default;
};

struct SplitCandidate {
  Split split;
  double gain = 0.0;
};

// Children must each keep at least this much in-the-bag weight and, when
// `enforce_oob` is set, this many out-of-bag rows.
struct SplitConstraints {
  double min_leaf = 1.0;
  bool enforce_oob = true;
};

namespace detail {

class SplitScanner {
 public:
  SplitScanner(const LabelSpec& spec, Criterion criterion,
               const SplitConstraints& constraints,
               std::span<const double> totals, double oob_total)
      : spec_(spec),
        criterion_(criterion),
        constraints_(constraints),
        totals_(totals.begin(), totals.end()),
        right_(totals.size()),
        oob_total_(oob_total),
        parent_weight_(spec.weight(totals)),
        parent_impurity_(impurity(totals, spec, criterion)) {}

  double parent_impurity() const { return parent_impurity_; }

  void consider(const Split& split, std::span<const double> left,
                double oob_left) {
    const double w_left = spec_.weight(left);
    for (std::size_t k = 0; k < totals_.size(); ++k) {
      right_[k] = totals_[k] - left[k];
    }
    const double w_right = parent_weight_ - w_left;
    if (w_left < constraints_.min_leaf || w_right < constraints_.min_leaf) {
      return;
    }
    if (constraints_.enforce_oob &&
        (oob_left < constraints_.min_leaf ||
         oob_total_ - oob_left < constraints_.min_leaf)) {
      return;
    }
    const double children =
        (w_left * impurity(left, spec_, criterion_) +
         w_right * impurity(right_, spec_, criterion_)) /
        parent_weight_;
    const double gain = parent_impurity_ - children;
    if (!(gain > 0.0)) return;
    SplitCandidate candidate{split, gain};
    if (!best_ || better(candidate, *best_)) best_ = candidate;
  }

  std::optional<SplitCandidate> result() && { return std::move(best_); }

 private:
  static bool better(const SplitCandidate& a, const SplitCandidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.split.feature != b.split.feature) {
      return a.split.feature < b.split.feature;
    }
    if (a.split.kind == FeatureKind::kContinuous) {
      if (a.split.threshold != b.split.threshold) {
        return a.split.threshold < b.split.threshold;
      }
      return !a.split.missing_left && b.split.missing_left;
    }
    return mask_less(a.split.left_bins, b.split.left_bins);
  }

  const LabelSpec& spec_;
  Criterion criterion_;
  const SplitConstraints& constraints_;
  std::vector<double> totals_;
  std::vector<double> right_;
  double oob_total_;
  double parent_weight_;
  double parent_impurity_;
  std::optional<SplitCandidate> best_;
};

inline double oob_count(const Histogram& oob, std::size_t j, std::size_t b) {
  return oob.n_features() == 0 ? 0.0 : oob.cell(j, b)[0];
}

inline void add_to(std::vector<double>& acc, std::span<const double> cell) {
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += cell[k];
}

// Prefix scan along the natural bin order. With `missing_left` the missing
// bin starts on the left; otherwise it stays on the right.
inline void scan_continuous(SplitScanner& scanner, const Histogram& itb,
                            const Histogram& oob, std::uint32_t feature,
                            const FeatureBins& fb, const LabelSpec& spec,
                            bool missing_left) {
  const std::uint32_t value_bins = fb.n_value_bins();
  std::optional<std::uint32_t> last_nonempty;
  for (std::uint32_t b = 0; b < value_bins; ++b) {
    if (spec.weight(itb.cell(feature, b)) > 0.0) last_nonempty = b;
  }
  if (!last_nonempty) return;
  const bool missing_nonempty =
      fb.has_missing && spec.weight(itb.cell(feature, fb.missing_bin)) > 0.0;

  std::vector<double> left(itb.width(), 0.0);
  double oob_left = 0.0;
  Split split;
  split.feature = feature;
  split.kind = FeatureKind::kContinuous;
  split.missing_left = missing_left;
  if (missing_left) {
    add_to(left, itb.cell(feature, fb.missing_bin));
    oob_left += oob_count(oob, feature, fb.missing_bin);
    split.left_bins.set(fb.missing_bin);
  }
  for (std::uint32_t b = 0; b < value_bins; ++b) {
    add_to(left, itb.cell(feature, b));
    oob_left += oob_count(oob, feature, b);
    split.left_bins.set(b);
    if (!(spec.weight(itb.cell(feature, b)) > 0.0)) continue;
    const bool right_nonempty =
        b < *last_nonempty || (!missing_left && missing_nonempty);
    if (!right_nonempty) break;
    split.threshold = b;
    scanner.consider(split, left, oob_left);
  }
}

// Prefix scan along bins sorted by `key` (ties by bin index).
inline void scan_ordered(SplitScanner& scanner, const Histogram& itb,
                         const Histogram& oob, std::uint32_t feature,
                         std::vector<std::uint32_t> bins,
                         const std::vector<double>& key) {
  std::stable_sort(bins.begin(), bins.end(), [&](auto a, auto b) {
    return key[a] < key[b];
  });
  std::vector<double> left(itb.width(), 0.0);
  double oob_left = 0.0;
  Split split;
  split.feature = feature;
  split.kind = FeatureKind::kCategorical;
  for (std::size_t r = 0; r + 1 < bins.size(); ++r) {
    add_to(left, itb.cell(feature, bins[r]));
    oob_left += oob_count(oob, feature, bins[r]);
    split.left_bins.set(bins[r]);
    scanner.consider(split, left, oob_left);
  }
}

inline void scan_categorical(SplitScanner& scanner, const Histogram& itb,
                             const Histogram& oob, std::uint32_t feature,
                             const FeatureBins& fb, const LabelSpec& spec) {
  std::vector<std::uint32_t> bins;
  for (std::uint32_t b = 0; b < fb.n_bins; ++b) {
    if (spec.weight(itb.cell(feature, b)) > 0.0) bins.push_back(b);
  }
  if (bins.size() < 2) return;
  std::vector<double> key(fb.n_bins, 0.0);
  auto run = [&](auto&& score) {
    for (auto b : bins) key[b] = score(itb.cell(feature, b));
    scan_ordered(scanner, itb, oob, feature, bins, key);
  };
  if (spec.task == Task::kRegression) {
    run([](std::span<const double> c) { return c[1] / c[0]; });
  } else if (spec.n_classes == 2) {
    run([&](std::span<const double> c) { return c[1] / spec.weight(c); });
  } else {
    for (std::size_t k = 0; k < spec.n_classes; ++k) {
      run([&](std::span<const double> c) { return c[k] / spec.weight(c); });
    }
  }
}

}  // namespace detail

// Best impurity-decreasing split of a node over `features`.
//
// `itb` holds the node's in-the-bag statistics for every feature of `bins`;
// `oob` holds out-of-bag row counts with the same shape (or is empty when
// constraints.enforce_oob is false). Features with fewer than two non-empty
// bins are skipped. Returns nothing when no admissible split has positive
// gain.
inline std::optional<SplitCandidate> find_best_split(
    const Histogram& itb, const Histogram& oob,
    std::span<const std::size_t> features, std::span<const FeatureBins> bins,
    const LabelSpec& spec, Criterion criterion,
    const SplitConstraints& constraints) {
  if (itb.n_features() == 0) return std::nullopt;
  std::vector<double> totals(itb.width(), 0.0);
  for (std::size_t b = 0; b < itb.n_bins(0); ++b) {
    detail::add_to(totals, itb.cell(0, b));
  }
  if (!(spec.weight(totals) > 0.0)) return std::nullopt;
  double oob_total = 0.0;
  if (oob.n_features() > 0) {
    for (std::size_t b = 0; b < oob.n_bins(0); ++b) {
      oob_total += oob.cell(0, b)[0];
    }
  }

  detail::SplitScanner scanner(spec, criterion, constraints, totals,
                               oob_total);
  if (!(scanner.parent_impurity() > 0.0)) return std::nullopt;

  for (auto j : features) {
    const auto& fb = bins[j];
    const auto feature = static_cast<std::uint32_t>(j);
    std::size_t nonempty = 0;
    for (std::size_t b = 0; b < fb.n_bins; ++b) {
      if (spec.weight(itb.cell(j, b)) > 0.0) ++nonempty;
    }
    if (nonempty < 2) continue;
    if (fb.kind == FeatureKind::kContinuous) {
      detail::scan_continuous(scanner, itb, oob, feature, fb, spec, false);
      if (fb.has_missing) {
        detail::scan_continuous(scanner, itb, oob, feature, fb, spec, true);
      }
    } else {
      detail::scan_categorical(scanner, itb, oob, feature, fb, spec);
    }
  }
  return std::move(scanner).result();
}

}  // namespace treeagg

#endif  // TREEAGG_SPLIT_HPP_
