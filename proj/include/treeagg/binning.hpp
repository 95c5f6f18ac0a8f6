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

#ifndef TREEAGG_BINNING_HPP_
#define TREEAGG_BINNING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treeagg/error.hpp"

namespace treeagg {

inline constexpr std::size_t kMaxBins = 256;

enum class FeatureKind : std::uint8_t { kContinuous = 0, kCategorical = 1 };

// One raw input column. Continuous values use NaN for missing; categorical
// values are strings with "" for missing. Only the vector matching `kind` is
// populated.
struct RawColumn {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  std::vector<double> numeric;
  std::vector<std::string> categorical;

  std::size_t size() const {
    return kind == FeatureKind::kContinuous ? numeric.size()
                                            : categorical.size();
  }
  bool is_missing(std::size_t i) const {
    return kind == FeatureKind::kContinuous ? std::isnan(numeric[i])
                                            : categorical[i].empty();
  }

  static RawColumn continuous(std::string name, std::vector<double> values) {
    RawColumn c;
    c.name = std::move(name);
    c.kind = FeatureKind::kContinuous;
    c.numeric = std::move(values);
    return c;
  }
  static RawColumn categories(std::string name,
                              std::vector<std::string> values) {
    RawColumn c;
    c.name = std::move(name);
    c.kind = FeatureKind::kCategorical;
    c.categorical = std::move(values);
    return c;
  }
};

struct RawMatrix {
  std::vector<RawColumn> columns;

  std::size_t n_cols() const { return columns.size(); }
  std::size_t n_rows() const {
    return columns.empty() ? 0 : columns.front().size();
  }

  void validate() const {
    for (const auto& c : columns) {
      if (c.size() != n_rows()) {
        throw DataError("column '" + c.name + "' has " +
                        std::to_string(c.size()) + " rows, expected " +
                        std::to_string(n_rows()));
      }
    }
  }

  // Rows selected by index, in the given order.
  RawMatrix take(std::span<const std::size_t> rows) const {
    RawMatrix out;
    out.columns.reserve(columns.size());
    for (const auto& c : columns) {
      RawColumn r;
      r.name = c.name;
      r.kind = c.kind;
      if (c.kind == FeatureKind::kContinuous) {
        r.numeric.reserve(rows.size());
        for (auto i : rows) r.numeric.push_back(c.numeric[i]);
      } else {
        r.categorical.reserve(rows.size());
        for (auto i : rows) r.categorical.push_back(c.categorical[i]);
      }
      out.columns.push_back(std::move(r));
    }
    return out;
  }
};

// Binning rule of one feature.
//
// Continuous: bin(v) = #{thresholds <= v}; thresholds are strictly increasing.
// Categorical: `categories` lists modalities in rank order (descending
// frequency, then value); rank r maps to bin min(r, overflow_bin).
// Missing values, when seen at fit time, own the rightmost bin.
struct FeatureBins {
  FeatureKind kind = FeatureKind::kContinuous;
  std::uint32_t n_bins = 1;
  std::vector<double> thresholds;
  std::vector<std::string> categories;
  bool has_missing = false;
  std::uint32_t missing_bin = 0;
  std::optional<std::uint32_t> overflow_bin;

  std::uint32_t n_value_bins() const { return n_bins - (has_missing ? 1 : 0); }

  void rebuild_index() {
    index_.clear();
    for (std::size_t r = 0; r < categories.size(); ++r) {
      auto bin = static_cast<std::uint32_t>(r);
      if (overflow_bin && bin > *overflow_bin) bin = *overflow_bin;
      index_.emplace(categories[r], bin);
    }
  }

  std::uint32_t bin_of(double v) const {
    return static_cast<std::uint32_t>(
        std::upper_bound(thresholds.begin(), thresholds.end(), v) -
        thresholds.begin());
  }

  std::optional<std::uint32_t> bin_of(const std::string& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const FeatureBins& a, const FeatureBins& b) {
    return a.kind == b.kind && a.n_bins == b.n_bins &&
           a.thresholds == b.thresholds && a.categories == b.categories &&
           a.has_missing == b.has_missing && a.missing_bin == b.missing_bin &&
           a.overflow_bin == b.overflow_bin;
  }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct BinMapper {
  std::vector<std::string> names;
  std::vector<FeatureBins> features;

  std::size_t n_features() const { return features.size(); }
  friend bool operator==(const BinMapper&, const BinMapper&) = default;
};

// Row-major matrix of bin indices, one byte per entry.
class BinnedMatrix {
 public:
  BinnedMatrix() = default;
  BinnedMatrix(std::size_t n_rows, std::size_t n_cols)
      : n_rows_(n_rows), n_cols_(n_cols), data_(n_rows * n_cols, 0) {}

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }

  std::uint8_t at(std::size_t i, std::size_t j) const {
    return data_[i * n_cols_ + j];
  }
  std::uint8_t& at(std::size_t i, std::size_t j) {
    return data_[i * n_cols_ + j];
  }
  std::span<const std::uint8_t> row(std::size_t i) const {
    return {data_.data() + i * n_cols_, n_cols_};
  }

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::uint8_t> data_;
};

namespace detail {

// Cut points at exact empirical quantiles. `sorted` holds the non-missing
// values in ascending order. Every threshold t satisfies a < t <= b for two
// distinct adjacent data values a < b, so no bin is empty on the fit data.
inline std::vector<double> quantile_thresholds(const std::vector<double>& sorted,
                                               std::size_t target_bins) {
  std::vector<double> thresholds;
  if (target_bins < 2 || sorted.empty()) return thresholds;
  auto midpoint = [](double a, double b) {
    double t = a + (b - a) / 2.0;
    return t <= a ? b : t;
  };

  std::vector<double> distinct;
  std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(distinct));
  if (distinct.size() <= target_bins) {
    for (std::size_t k = 1; k < distinct.size(); ++k) {
      thresholds.push_back(midpoint(distinct[k - 1], distinct[k]));
    }
    return thresholds;
  }

  const std::size_t m = sorted.size();
  for (std::size_t k = 1; k < target_bins; ++k) {
    const std::size_t pos = k * m / target_bins;
    if (pos == 0) continue;
    double lo = sorted[pos - 1];
    double hi = sorted[pos];
    if (!(lo < hi)) {
      // The cut falls inside a tie group: put the whole group on the left.
      auto next = std::upper_bound(sorted.begin(), sorted.end(), lo);
      if (next == sorted.end()) continue;
      hi = *next;
    }
    const double t = midpoint(lo, hi);
    if (thresholds.empty() || t > thresholds.back()) thresholds.push_back(t);
  }
  return thresholds;
}

inline FeatureBins fit_continuous(const RawColumn& column, std::size_t b_max) {
  FeatureBins fb;
  fb.kind = FeatureKind::kContinuous;
  std::vector<double> values;
  values.reserve(column.numeric.size());
  for (double v : column.numeric) {
    if (std::isnan(v)) {
      fb.has_missing = true;
    } else {
      values.push_back(v);
    }
  }
  if (values.empty()) {
    throw DataError("feature '" + column.name + "' has only missing values");
  }
  std::sort(values.begin(), values.end());
  const std::size_t slots = b_max - (fb.has_missing ? 1 : 0);
  fb.thresholds = quantile_thresholds(values, slots);
  fb.n_bins = static_cast<std::uint32_t>(fb.thresholds.size() + 1 +
                                         (fb.has_missing ? 1 : 0));
  if (fb.has_missing) fb.missing_bin = fb.n_bins - 1;
  return fb;
}

inline FeatureBins fit_categorical(const RawColumn& column, std::size_t b_max) {
  FeatureBins fb;
  fb.kind = FeatureKind::kCategorical;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& v : column.categorical) {
    if (v.empty()) {
      fb.has_missing = true;
    } else {
      ++counts[v];
    }
  }
  if (counts.empty()) {
    throw DataError("feature '" + column.name + "' has only missing values");
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const std::size_t slots = b_max - (fb.has_missing ? 1 : 0);
  for (auto& [value, count] : ranked) fb.categories.push_back(std::move(value));
  std::size_t value_bins = fb.categories.size();
  if (value_bins > slots) {
    value_bins = slots;
    fb.overflow_bin = static_cast<std::uint32_t>(slots - 1);
  }
  fb.n_bins =
      static_cast<std::uint32_t>(value_bins + (fb.has_missing ? 1 : 0));
  if (fb.has_missing) fb.missing_bin = fb.n_bins - 1;
  fb.rebuild_index();
  return fb;
}

}  // namespace detail

// Learns per-feature binning rules from the raw training columns.
inline BinMapper fit_bins(const RawMatrix& raw, std::size_t b_max = kMaxBins) {
  if (b_max < 2) throw ConfigError("b_max must be at least 2");
  if (b_max > kMaxBins) {
    throw ConfigError("b_max must be at most " + std::to_string(kMaxBins));
  }
  raw.validate();
  BinMapper mapper;
  for (const auto& column : raw.columns) {
    mapper.names.push_back(column.name);
    mapper.features.push_back(column.kind == FeatureKind::kContinuous
                                  ? detail::fit_continuous(column, b_max)
                                  : detail::fit_categorical(column, b_max));
  }
  return mapper;
}

inline std::uint32_t bin_value(const FeatureBins& fb, const RawColumn& column,
                               std::size_t i) {
  if (column.is_missing(i)) {
    if (fb.has_missing) return fb.missing_bin;
    if (fb.kind == FeatureKind::kCategorical && fb.overflow_bin) {
      return *fb.overflow_bin;
    }
    throw DataError("missing value in feature '" + column.name +
                    "' which had no missing values at fit time");
  }
  if (fb.kind == FeatureKind::kContinuous) return fb.bin_of(column.numeric[i]);
  if (auto bin = fb.bin_of(column.categorical[i])) return *bin;
  if (fb.has_missing) return fb.missing_bin;
  if (fb.overflow_bin) return *fb.overflow_bin;
  throw DataError("unseen category '" + column.categorical[i] +
                  "' in feature '" + column.name + "'");
}

inline BinnedMatrix transform(const RawMatrix& raw, const BinMapper& mapper) {
  raw.validate();
  if (raw.n_cols() != mapper.n_features()) {
    throw DataError("expected " + std::to_string(mapper.n_features()) +
                    " feature columns, got " + std::to_string(raw.n_cols()));
  }
  BinnedMatrix out(raw.n_rows(), raw.n_cols());
  for (std::size_t j = 0; j < raw.n_cols(); ++j) {
    const auto& column = raw.columns[j];
    const auto& fb = mapper.features[j];
    if (column.kind != fb.kind) {
      throw DataError("feature '" + column.name +
                      "' kind differs from the fitted kind");
    }
    for (std::size_t i = 0; i < raw.n_rows(); ++i) {
      out.at(i, j) = static_cast<std::uint8_t>(bin_value(fb, column, i));
    }
  }
  return out;
}

}  // namespace treeagg

#endif  // TREEAGG_BINNING_HPP_
